/* tslint:disable */
/* eslint-disable */

export class DensityView {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    labels(): Uint8Array;
    values(): Float64Array;
    readonly fractionInside: number;
}

export function bornProfile(n: number, half: number, points: number): Float64Array;

export function densityMap(n: number, half_re: number, half_im: number, cells_re: number, cells_im: number): DensityView;

export function traceTrajectory(n: number, re: number, im: number, t_max: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_densityview_free: (a: number, b: number) => void;
    readonly bornProfile: (a: number, b: number, c: number) => [number, number, number, number];
    readonly densityMap: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly densityview_fractionInside: (a: number) => number;
    readonly densityview_labels: (a: number) => [number, number];
    readonly densityview_values: (a: number) => [number, number];
    readonly traceTrajectory: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
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
