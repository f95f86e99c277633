import { describe, expect, it } from "vitest";

import {
  initialViewState,
  pxToScreenCm,
  switchTool,
  type Camera3D,
} from "../src/viewstate.js";

const camera: Camera3D = {
  origin: [5, 0, 1],
  dir: [-1, 0, 0],
  up: [0, 0, 1],
  right: [0, 1, 0],
  pxPerCm: 10,
  viewport: [800, 600],
};

describe("view state", () => {
  it("mirror toggle defaults to the symmetry declaration", () => {
    expect(initialViewState(camera, true).mirror).toBe(true);
    expect(initialViewState(camera, false).mirror).toBe(false);
  });

  it("switching tools clears selection and pending sketch", () => {
    let state = initialViewState(camera, false);
    state = {
      ...state,
      tool: "cut",
      sketchPx: [[0, 0], [10, 10]],
      selection: { ...state.selection, regionTriangles: [1, 2] },
    };
    const next = switchTool(state, "scale");
    expect(next.tool).toBe("scale");
    expect(next.sketchPx).toEqual([]);
    expect(next.selection.regionTriangles).toEqual([]);
  });

  it("switching to the same tool is a no-op", () => {
    const state = initialViewState(camera, false);
    expect(switchTool(state, state.tool)).toBe(state);
  });

  it("maps pixels to centered cm with y up", () => {
    expect(pxToScreenCm(camera, [400, 300])).toEqual([0, 0]);
    expect(pxToScreenCm(camera, [410, 300])).toEqual([1, 0]);
    expect(pxToScreenCm(camera, [400, 290])).toEqual([0, 1]);
  });
});
