/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_densityview_free: (a: number, b: number) => void;
export const bornProfile: (a: number, b: number, c: number) => [number, number, number, number];
export const densityMap: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const densityview_fractionInside: (a: number) => number;
export const densityview_labels: (a: number) => [number, number];
export const densityview_values: (a: number) => [number, number];
export const traceTrajectory: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
