/* tslint:disable */
/* eslint-disable */

/**
 * m(P(x₁),…,P(x_n)) for n = 1..max_n, as JSON
 * `{family, log_sup_norm, rows: [{n, value, closed_form}]}` or `{error_message}`.
 */
export function gmm_curve(family: string, max_n: number): string;

/**
 * m(P) of a polynomial typed by the user, as JSON
 * `{value, error, method, samples, vars}` or `{error_message}`.
 */
export function measure(text: string): string;

/**
 * 𝓛ₙ(z) on a `res × res` grid over [re_min, re_max] × [im_min, im_max], row
 * by row from the top (largest imaginary part). n = 2 is the Bloch–Wigner
 * function. Returns an empty array for invalid input.
 */
export function zagier_grid(n: number, res: number, re_min: number, re_max: number, im_min: number, im_max: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly gmm_curve: (a: number, b: number, c: number) => [number, number];
    readonly measure: (a: number, b: number) => [number, number];
    readonly zagier_grid: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
