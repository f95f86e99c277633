/** Turn raw pointer gestures into edit-op records for the service.
 *
 * Each toolbar tool maps to exactly one op kind; a zero-length drag maps to
 * no op at all.  All distances go through the camera's px-per-cm scale so
 * the ops are expressed in world cm.
 */

import type { EditOpRecord, Vec2 } from "./types.js";
import { pxToScreenCm, type ViewState } from "./viewstate.js";

export interface PointerEventRec {
  type: "down" | "move" | "up";
  px: Vec2;
}

export interface CapturedEdit {
  op: EditOpRecord;
  mirror: boolean;
}

function dragEndpoints(events: PointerEventRec[]): [Vec2, Vec2] | null {
  const down = events.find((e) => e.type === "down");
  const up = [...events].reverse().find((e) => e.type === "up");
  if (!down || !up) return null;
  return [down.px, up.px];
}

function sub(a: Vec2, b: Vec2): Vec2 {
  return [a[0] - b[0], a[1] - b[1]];
}

function dot(a: Vec2, b: Vec2): number {
  return a[0] * b[0] + a[1] * b[1];
}

function norm(a: Vec2): number {
  return Math.hypot(a[0], a[1]);
}

/** Signed radial drag in cm: positive away from the viewport center. */
export function radialDragCm(state: ViewState, from: Vec2, to: Vec2): number {
  const a = pxToScreenCm(state.camera, from);
  const b = pxToScreenCm(state.camera, to);
  const drag = sub(b, a);
  const r = norm(a);
  if (r < 1e-12) return norm(drag);
  const outward: Vec2 = [a[0] / r, a[1] / r];
  return dot(drag, outward);
}

function captureScale(state: ViewState, events: PointerEventRec[]): EditOpRecord | null {
  const ends = dragEndpoints(events);
  if (!ends) return null;
  const sel = state.selection;
  if (!sel.regionTriangles.length || sel.regionRadiusCm === null) return null;
  const r = radialDragCm(state, ends[0], ends[1]);
  if (r === 0) return null;
  const factor = (sel.regionRadiusCm + r) / sel.regionRadiusCm;
  return {
    kind: "scale_region",
    params: {
      region: { triangles: sel.regionTriangles, anchors: sel.anchors },
      mode: sel.scaleMode,
      factor,
    },
  };
}

function captureMoveSeam(state: ViewState, events: PointerEventRec[]): EditOpRecord | null {
  const ends = dragEndpoints(events);
  if (!ends) return null;
  const sel = state.selection;
  if (sel.seam === null) return null;
  const a = pxToScreenCm(state.camera, ends[0]);
  const b = pxToScreenCm(state.camera, ends[1]);
  // along: vertical screen travel; perpendicular: radial travel
  const offset = sel.seamMode === "along" ? b[1] - a[1] : radialDragCm(state, ends[0], ends[1]);
  if (offset === 0) return null;
  return {
    kind: "move_seam",
    params: {
      seam: sel.seam,
      mode: sel.seamMode,
      offset,
      fixed_far: sel.seamFixedFar,
    },
  };
}

function captureCut(state: ViewState, events: PointerEventRec[]): EditOpRecord | null {
  const path = events.filter((e) => e.type !== "up").map((e) => e.px);
  const sketch: Vec2[] = [];
  for (const px of path) {
    const p = pxToScreenCm(state.camera, px);
    const last = sketch[sketch.length - 1];
    if (!last || norm(sub(p, last)) > 1e-9) sketch.push(p);
  }
  if (sketch.length < 2) return null;
  const { origin, dir, up, right } = state.camera;
  return {
    kind: "cut",
    params: {
      sketch,
      camera: { origin, dir, up, right },
      both_sides: true,
      keep: "positive",
    },
  };
}

function captureBoundaryDrag(state: ViewState, events: PointerEventRec[]): EditOpRecord | null {
  const ends = dragEndpoints(events);
  if (!ends) return null;
  const sel = state.selection;
  if (!sel.boundaryChain.length || !sel.boundaryOutwardPx) return null;
  const a = pxToScreenCm(state.camera, ends[0]);
  const b = pxToScreenCm(state.camera, ends[1]);
  // outward direction given in px (y down); flip y into screen-cm space
  const o: Vec2 = [sel.boundaryOutwardPx[0], -sel.boundaryOutwardPx[1]];
  const len = norm(o);
  if (len < 1e-12) return null;
  const d = dot(sub(b, a), [o[0] / len, o[1] / len]);
  if (d === 0) return null;
  // dragging the boundary outward grows the garment, inward trims it
  if (d > 0) {
    return { kind: "extend", params: { boundary: sel.boundaryChain, distance: d } };
  }
  return { kind: "shorten", params: { boundary: sel.boundaryChain, distance: -d } };
}

export function captureEdit(
  state: ViewState,
  events: PointerEventRec[],
): CapturedEdit | null {
  let op: EditOpRecord | null = null;
  switch (state.tool) {
    case "scale":
      op = captureScale(state, events);
      break;
    case "move_seam":
      op = captureMoveSeam(state, events);
      break;
    case "cut":
      op = captureCut(state, events);
      break;
    case "shorten_extend":
      op = captureBoundaryDrag(state, events);
      break;
    default:
      op = null; // select and move_panel never emit edit ops
  }
  if (!op) return null;
  return { op, mirror: state.mirror && state.symmetryDeclared };
}
