/* tslint:disable */
/* eslint-disable */

/**
 * `n x n` correlation map on `[0, t_end]`, row-major, `NaN` where masked.
 */
export function g2_map(kappa: number, gamma: number, gamma_d: number, peak_rate: number, t_end: number, n: number): Float64Array;

/**
 * Response to the 0.8/5/0.8 us Tukey pulse on `n` points over `[0, t_end]`.
 * Layout: `[time | in_rate | out_rate | rydberg_population]`, each of length `n`.
 */
export function time_traces(kappa: number, gamma: number, gamma_d: number, peak_rate: number, t_end: number, n: number): Float64Array;

/**
 * Visibility over log grids; row-major with `lambda` as the slow index.
 * The last `2 * n_lambda` entries are the overdamped and crossover photon
 * numbers per row.
 */
export function visibility_map(lambda_lo: number, lambda_hi: number, n_lambda: number, nph_lo: number, nph_hi: number, n_nph: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly g2_map: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly time_traces: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly visibility_map: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
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
