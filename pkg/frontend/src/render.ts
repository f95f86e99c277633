/** Deterministic headless rendering of the two editor windows.
 *
 * Both windows are rendered to ordered draw-command lists (a canvas or SVG
 * backend replays them verbatim), so identical state always produces an
 * identical frame and tests can assert on the commands directly.
 */

import {
  unflatten2,
  unflatten3,
  type GarmentPayload,
  type PanelPayload,
  type Vec2,
  type Vec3,
} from "./types.js";
import type { Camera3D, ViewState } from "./viewstate.js";

export const COLORS = {
  body: "#d9c8a9", // beige, matches the 3D window background convention
  featurePoint: "#d62728", // red
  selected: "#b8860b", // dark yellow
  affected: "#f5e6a8", // soft yellow
  boundary: "#1f1f1f",
  originalBoundary: "#808080",
};

const PANEL_PALETTE = [
  "#8db4d9",
  "#a8d5a2",
  "#d9a8c8",
  "#d9c78d",
  "#9fd0cf",
  "#c4a8d9",
];

export function panelColor(id: number): string {
  return PANEL_PALETTE[((id % PANEL_PALETTE.length) + PANEL_PALETTE.length) % PANEL_PALETTE.length]!;
}

export type DrawCommand =
  | {
      kind: "triangles";
      points: Vec2[]; // three per triangle, screen px
      fill: string;
    }
  | {
      kind: "polyline";
      points: Vec2[]; // screen px
      closed: boolean;
      stroke: string;
      dashed: boolean;
    }
  | {
      kind: "dots";
      points: Vec2[]; // screen px
      color: string;
    };

export interface Frame {
  window: "3d" | "2d";
  revision: number;
  commands: DrawCommand[];
}

export interface SceneGeometry {
  garment: GarmentPayload;
  pattern: PanelPayload[];
  /** Panel boundaries as designed, for the dashed overlay. */
  originalPattern?: PanelPayload[];
  /** Body surface, available to clients that loaded the document locally. */
  body?: { vertices: number[]; triangles: number[] };
  /** Garment triangle rows touched by the last edit. */
  affectedTriangles?: number[];
  /** Panel layout offsets in cm, as served by get_state. */
  layout?: Record<string, Vec2>;
  featurePoints?: Record<string, number[]>;
}

export function project3(camera: Camera3D, v: Vec3): Vec2 {
  const rel: Vec3 = [v[0] - camera.origin[0], v[1] - camera.origin[1], v[2] - camera.origin[2]];
  const sx = rel[0] * camera.right[0] + rel[1] * camera.right[1] + rel[2] * camera.right[2];
  const sy = rel[0] * camera.up[0] + rel[1] * camera.up[1] + rel[2] * camera.up[2];
  const [w, h] = camera.viewport;
  return [w / 2 + sx * camera.pxPerCm, h / 2 - sy * camera.pxPerCm];
}

function project2(state: ViewState, p: Vec2, offset: Vec2): Vec2 {
  const { pan, zoom } = state.view2d;
  return [(p[0] + offset[0] - pan[0]) * zoom, -(p[1] + offset[1] - pan[1]) * zoom];
}

function render3d(state: ViewState, scene: SceneGeometry): Frame {
  const commands: DrawCommand[] = [];
  if (scene.body) {
    const bv = unflatten3(scene.body.vertices);
    const pts: Vec2[] = [];
    for (const idx of scene.body.triangles) {
      pts.push(project3(state.camera, bv[idx]!));
    }
    commands.push({ kind: "triangles", points: pts, fill: COLORS.body });
  }

  const gv = unflatten3(scene.garment.vertices).map((v) => project3(state.camera, v));
  const affected = new Set(scene.affectedTriangles ?? []);
  const selected = new Set(state.selection.regionTriangles);
  const nTris = scene.garment.panel_ids.length;
  // group triangles by style so the frame stays small and ordering stable
  const groups = new Map<string, Vec2[]>();
  for (let t = 0; t < nTris; t += 1) {
    const pid = scene.garment.panel_ids[t]!;
    const fill = selected.has(t)
      ? COLORS.selected
      : affected.has(t)
        ? COLORS.affected
        : panelColor(pid);
    const pts = groups.get(fill) ?? [];
    for (let k = 0; k < 3; k += 1) {
      pts.push(gv[scene.garment.triangles[3 * t + k]!]!);
    }
    groups.set(fill, pts);
  }
  for (const fill of [...groups.keys()].sort()) {
    commands.push({ kind: "triangles", points: groups.get(fill)!, fill });
  }

  const feature = scene.featurePoints ?? {};
  const dots: Vec2[] = [];
  for (const name of Object.keys(feature).sort()) {
    const p = feature[name]!;
    dots.push(project3(state.camera, [p[0]!, p[1]!, p[2]!]));
  }
  if (dots.length) {
    commands.push({ kind: "dots", points: dots, color: COLORS.featurePoint });
  }
  return { window: "3d", revision: state.revision, commands };
}

function boundaryPoints(panel: PanelPayload): Vec2[] {
  const verts = unflatten2(panel.vertices2d);
  return panel.boundary.map((i) => verts[i]!);
}

function render2d(state: ViewState, scene: SceneGeometry): Frame {
  const commands: DrawCommand[] = [];
  const layout = scene.layout ?? {};
  const originals = new Map(
    (scene.originalPattern ?? []).map((p) => [p.id, p]),
  );
  const affectedPanels = new Set<number>();
  for (const t of scene.affectedTriangles ?? []) {
    affectedPanels.add(scene.garment.panel_ids[t]!);
  }

  for (const panel of [...scene.pattern].sort((a, b) => a.id - b.id)) {
    const offset = layout[String(panel.id)] ?? ([0, 0] as Vec2);
    const verts = unflatten2(panel.vertices2d).map((p) => project2(state, p, offset));
    const fill =
      state.selection.panel === panel.id
        ? COLORS.selected
        : affectedPanels.has(panel.id)
          ? COLORS.affected
          : panelColor(panel.id);
    const pts: Vec2[] = [];
    for (const idx of panel.triangles) {
      pts.push(verts[idx]!);
    }
    commands.push({ kind: "triangles", points: pts, fill });
    commands.push({
      kind: "polyline",
      points: panel.boundary.map((i) => verts[i]!),
      closed: true,
      stroke: COLORS.boundary,
      dashed: false,
    });
    const original = originals.get(panel.id);
    if (original) {
      commands.push({
        kind: "polyline",
        points: boundaryPoints(original).map((p) => project2(state, p, offset)),
        closed: true,
        stroke: COLORS.originalBoundary,
        dashed: true,
      });
    }
  }
  return { window: "2d", revision: state.revision, commands };
}

/** Render both windows; refuses to paint a frame for a stale revision. */
export function renderViews(
  state: ViewState,
  scene: SceneGeometry,
  geometryRevision: number,
): { frames: [Frame, Frame] } | { staleRevision: true } {
  if (geometryRevision !== state.revision) {
    return { staleRevision: true };
  }
  return { frames: [render3d(state, scene), render2d(state, scene)] };
}
