import { describe, expect, it } from "vitest";

import { captureEdit, type PointerEventRec } from "../src/capture.js";
import {
  initialViewState,
  type Camera3D,
  type ViewState,
} from "../src/viewstate.js";

const camera: Camera3D = {
  origin: [5, 0, 1],
  dir: [-1, 0, 0],
  up: [0, 0, 1],
  right: [0, 1, 0],
  pxPerCm: 10,
  viewport: [800, 600],
};

function drag(from: [number, number], to: [number, number]): PointerEventRec[] {
  return [
    { type: "down", px: from },
    { type: "move", px: to },
    { type: "up", px: to },
  ];
}

function scaleState(symmetry = false): ViewState {
  const base = initialViewState(camera, symmetry);
  return {
    ...base,
    tool: "scale",
    selection: {
      ...base.selection,
      regionTriangles: [0, 1, 2],
      regionRadiusCm: 2,
      scaleMode: "perpendicular",
    },
  };
}

describe("captureEdit", () => {
  it("zero-length drag emits no op", () => {
    expect(captureEdit(scaleState(), drag([500, 300], [500, 300]))).toBeNull();
  });

  it("radial drag maps to factor (R + r) / R", () => {
    // start 10 cm right of center, drag 2 cm further out, R = 2
    const captured = captureEdit(scaleState(), drag([500, 300], [520, 300]));
    expect(captured).not.toBeNull();
    expect(captured!.op.kind).toBe("scale_region");
    expect(captured!.op.params["factor"]).toBeCloseTo(2.0, 12);
    expect(captured!.op.params["mode"]).toBe("perpendicular");
    expect(captured!.mirror).toBe(false);
  });

  it("inward drag shrinks the factor below one", () => {
    const captured = captureEdit(scaleState(), drag([500, 300], [490, 300]));
    expect(captured!.op.params["factor"]).toBeCloseTo(0.5, 12);
  });

  it("mirror flag follows the toggle when symmetry is declared", () => {
    const captured = captureEdit(scaleState(true), drag([500, 300], [520, 300]));
    expect(captured!.mirror).toBe(true);
  });

  it("boundary drag inward emits shorten with positive cm distance", () => {
    const base = initialViewState(camera, false);
    const state: ViewState = {
      ...base,
      tool: "shorten_extend",
      selection: {
        ...base.selection,
        boundaryChain: [0, 1, 2],
        boundaryOutwardPx: [0, 1], // outward is downward on screen
      },
    };
    const inward = captureEdit(state, drag([400, 300], [400, 270]));
    expect(inward!.op.kind).toBe("shorten");
    expect(inward!.op.params["distance"]).toBeCloseTo(3.0, 12);

    const outward = captureEdit(state, drag([400, 300], [400, 330]));
    expect(outward!.op.kind).toBe("extend");
    expect(outward!.op.params["distance"]).toBeCloseTo(3.0, 12);
  });

  it("sketch path becomes a cut op carrying the camera", () => {
    const base = initialViewState(camera, false);
    const state: ViewState = { ...base, tool: "cut" };
    const events: PointerEventRec[] = [
      { type: "down", px: [100, 280] },
      { type: "move", px: [400, 280] },
      { type: "move", px: [700, 280] },
      { type: "up", px: [700, 280] },
    ];
    const captured = captureEdit(state, events);
    expect(captured!.op.kind).toBe("cut");
    const params = captured!.op.params as {
      sketch: [number, number][];
      camera: { origin: number[]; dir: number[] };
    };
    expect(params.sketch).toEqual([[-30, 2], [0, 2], [30, 2]]);
    expect(params.camera.origin).toEqual([5, 0, 1]);
    expect(params.camera.dir).toEqual([-1, 0, 0]);
  });

  it("degenerate sketch emits no op", () => {
    const base = initialViewState(camera, false);
    const state: ViewState = { ...base, tool: "cut" };
    expect(captureEdit(state, [{ type: "down", px: [100, 100] }])).toBeNull();
  });

  it("select tool never emits ops", () => {
    const state = initialViewState(camera, false);
    expect(captureEdit(state, drag([0, 0], [50, 50]))).toBeNull();
  });
});
