/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_graphview_free: (a: number, b: number) => void;
export const __wbg_scene_free: (a: number, b: number) => void;
export const graphview_edges: (a: number) => [number, number];
export const graphview_frameFeatures: (a: number) => [number, number];
export const graphview_nodeFeatures: (a: number, b: number) => [number, number];
export const graphview_numEdges: (a: number) => number;
export const graphview_numNodes: (a: number) => number;
export const graphview_pointsBefore: (a: number) => number;
export const graphview_positions: (a: number) => [number, number];
export const graphview_velocities: (a: number) => [number, number];
export const scene_bones: () => [number, number];
export const scene_frameCount: (a: number) => number;
export const scene_graph: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const scene_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const scene_skeleton: (a: number, b: number) => [number, number];
export const statboxNames: () => [number, number];
export const statboxText: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_start: () => void;
