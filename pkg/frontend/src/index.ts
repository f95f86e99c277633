export * from "./types.js";
export * from "./api.js";
export * from "./viewstate.js";
export * from "./capture.js";
export * from "./render.js";
export * from "./layout.js";
