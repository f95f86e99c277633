/** Panel layout moves: pure view-state geometry, persisted via the service.
 *
 * Layout offsets never touch panel-internal coordinates, and undo of an
 * edit op does not reset them (they live beside the document, not in it).
 */

import type { SessionClient } from "./api.js";
import type { Vec2 } from "./types.js";
import type { ViewState } from "./viewstate.js";

export interface LayoutStore {
  offsets: Record<string, Vec2>;
}

/** Apply a drag (cm) to a panel's layout offset locally. */
export function movePanelLayout(
  store: LayoutStore,
  panel: number,
  dragCm: Vec2,
): LayoutStore {
  const key = String(panel);
  const current = store.offsets[key] ?? ([0, 0] as Vec2);
  return {
    offsets: {
      ...store.offsets,
      [key]: [current[0] + dragCm[0], current[1] + dragCm[1]],
    },
  };
}

/** Convert a 2D-window pixel drag into cm using the window zoom. */
export function dragPxToCm(state: ViewState, dragPx: Vec2): Vec2 {
  return [dragPx[0] / state.view2d.zoom, -dragPx[1] / state.view2d.zoom];
}

/** Persist one panel's offset so other clients see the same layout. */
export async function persistLayout(
  client: SessionClient,
  store: LayoutStore,
  panel: number,
): Promise<Record<string, Vec2>> {
  const offset = store.offsets[String(panel)] ?? ([0, 0] as Vec2);
  return client.setLayout(panel, offset);
}
