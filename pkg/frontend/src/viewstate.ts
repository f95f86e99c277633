/** Editor view state: camera, pan/zoom, active tool, selection, sketch. */

import type { CameraRecord, Vec2 } from "./types.js";

export type Tool = "select" | "scale" | "move_seam" | "cut" | "shorten_extend" | "move_panel";

export interface Camera3D extends CameraRecord {
  /** Screen pixels per world cm (orthographic). */
  pxPerCm: number;
  /** Viewport size in px; screen origin is its center. */
  viewport: Vec2;
}

export interface View2D {
  pan: Vec2; // cm
  zoom: number; // px per cm
}

/** What the user has picked for the active tool to act on. */
export interface Selection {
  /** Garment triangle rows of the selected region (scale tool). */
  regionTriangles: number[];
  /** Anchor garment vertices the scale must not move. */
  anchors: number[];
  /** Distance region-to-bone in cm; drag radius maps through it. */
  regionRadiusCm: number | null;
  scaleMode: "perpendicular" | "along";
  /** Seam index (move-seam tool). */
  seam: number | null;
  seamMode: "perpendicular" | "along";
  seamFixedFar: boolean;
  /** Ordered garment-vertex boundary chain (shorten/extend tool). */
  boundaryChain: number[];
  /** Unit screen-space direction pointing off the garment at that boundary. */
  boundaryOutwardPx: Vec2 | null;
  /** Panel id (move-panel tool). */
  panel: number | null;
}

export interface ViewState {
  sessionId: string | null;
  revision: number;
  camera: Camera3D;
  view2d: View2D;
  tool: Tool;
  selection: Selection;
  /** Pending sketch polyline in screen px (cut tool). */
  sketchPx: Vec2[];
  /** Mirror toggle; defaults on when the document declares symmetry. */
  mirror: boolean;
  symmetryDeclared: boolean;
}

export function emptySelection(): Selection {
  return {
    regionTriangles: [],
    anchors: [],
    regionRadiusCm: null,
    scaleMode: "perpendicular",
    seam: null,
    seamMode: "along",
    seamFixedFar: true,
    boundaryChain: [],
    boundaryOutwardPx: null,
    panel: null,
  };
}

export function initialViewState(camera: Camera3D, symmetryDeclared: boolean): ViewState {
  return {
    sessionId: null,
    revision: 0,
    camera,
    view2d: { pan: [0, 0], zoom: 20 },
    tool: "select",
    selection: emptySelection(),
    sketchPx: [],
    mirror: symmetryDeclared,
    symmetryDeclared,
  };
}

/** Switching tools clears tool-specific state (selection and sketch). */
export function switchTool(state: ViewState, tool: Tool): ViewState {
  if (tool === state.tool) return state;
  return { ...state, tool, selection: emptySelection(), sketchPx: [] };
}

/** Screen px (origin top-left) -> camera-plane cm (origin center, y up). */
export function pxToScreenCm(camera: Camera3D, px: Vec2): Vec2 {
  const [w, h] = camera.viewport;
  return [
    (px[0] - w / 2) / camera.pxPerCm,
    (h / 2 - px[1]) / camera.pxPerCm,
  ];
}
