/* tslint:disable */
/* eslint-disable */

/**
 * A built graph with accessors shaped for drawing.
 */
export class GraphView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    /**
     * `(target, source)` pairs, flattened.
     */
    edges(): Uint32Array;
    frameFeatures(): Float64Array;
    /**
     * The 19 node features of one node; empty when out of range.
     */
    nodeFeatures(node: number): Float64Array;
    numEdges(): number;
    numNodes(): number;
    pointsBefore(): number;
    /**
     * Node positions, flattened `x, y, z`.
     */
    positions(): Float64Array;
    /**
     * Doppler velocity per node.
     */
    velocities(): Float64Array;
}

/**
 * One synthetic sequence held in memory.
 */
export class Scene {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Joint index pairs of the stick figure, flattened.
     */
    static bones(): Uint32Array;
    frameCount(): number;
    /**
     * `q = 0` turns downsampling off.
     */
    graph(frame: number, k: number, q: number, cell_m: number): GraphView;
    constructor(motion: string, points: number, frames: number, seed: number);
    /**
     * Ground-truth joints of a frame, flattened `x, y, z` per joint.
     */
    skeleton(frame: number): Float64Array;
}

export function statboxNames(): string[];

/**
 * The 10 statistics of the numbers in `text`, in operator order.
 */
export function statboxText(text: string): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_graphview_free: (a: number, b: number) => void;
    readonly __wbg_scene_free: (a: number, b: number) => void;
    readonly graphview_edges: (a: number) => [number, number];
    readonly graphview_frameFeatures: (a: number) => [number, number];
    readonly graphview_nodeFeatures: (a: number, b: number) => [number, number];
    readonly graphview_numEdges: (a: number) => number;
    readonly graphview_numNodes: (a: number) => number;
    readonly graphview_pointsBefore: (a: number) => number;
    readonly graphview_positions: (a: number) => [number, number];
    readonly graphview_velocities: (a: number) => [number, number];
    readonly scene_bones: () => [number, number];
    readonly scene_frameCount: (a: number) => number;
    readonly scene_graph: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly scene_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly scene_skeleton: (a: number, b: number) => [number, number];
    readonly statboxNames: () => [number, number];
    readonly statboxText: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_drop_slice: (a: number, b: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
