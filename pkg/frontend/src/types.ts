/** Shared payload and edit-op types mirroring the service's JSON contract. */

export type Vec2 = [number, number];
export type Vec3 = [number, number, number];

/** Flat coordinate array as served: [x0, y0, (z0,) x1, ...]. */
export type FlatCoords = number[];

export interface GarmentPayload {
  vertices: FlatCoords; // xyz triples
  triangles: number[]; // vertex index triples
  panel_ids: number[]; // one per triangle
}

export interface PanelPayload {
  id: number;
  vertices2d: FlatCoords; // xy pairs, cm
  triangles: number[];
  boundary: number[]; // ordered boundary loop, local vertex indices
  corr: number[]; // local vertex -> garment vertex
}

export interface SessionSummary {
  panels: number[];
  seams: number;
  boundaries: Record<string, number[]>;
  symmetry: boolean;
  feature_points: Record<string, FlatCoords>;
}

export interface StatePayload {
  revision: number;
  layout: Record<string, Vec2>;
  garment?: GarmentPayload;
  pattern?: PanelPayload[];
}

export interface OpResponse {
  revision: number;
  affected: number[];
  traces: Record<string, number[]>;
  panels: PanelPayload[];
  garment?: GarmentPayload;
}

export interface ServiceError {
  code: string;
  entity: string | null;
  message: string;
}

/** Camera record as the cut op expects it: world-space axes, cm screen. */
export interface CameraRecord {
  origin: Vec3;
  dir: Vec3;
  up: Vec3;
  right: Vec3;
}

export type EditKind = "scale_region" | "move_seam" | "cut" | "shorten" | "extend";

export interface EditOpRecord {
  kind: EditKind;
  params: Record<string, unknown>;
}

export function unflatten2(coords: FlatCoords): Vec2[] {
  const out: Vec2[] = [];
  for (let i = 0; i + 1 < coords.length; i += 2) {
    out.push([coords[i]!, coords[i + 1]!]);
  }
  return out;
}

export function unflatten3(coords: FlatCoords): Vec3[] {
  const out: Vec3[] = [];
  for (let i = 0; i + 2 < coords.length; i += 3) {
    out.push([coords[i]!, coords[i + 1]!, coords[i + 2]!]);
  }
  return out;
}
