/* tslint:disable */
/* eslint-disable */

/**
 * Ground fidelity along an ASP ramp from B_Z = 3 to 0.
 */
export function asp_fidelity(sites: number, b_x: number, dt: number, t_max: number): string;

/**
 * Exact, truncated and EC ground energies over B_Z in [0, 3].
 *
 * `method` is `"ite"` (dtau 0.2, `truncation` = tau_max, uniform start)
 * or `"asp"` (dt 0.05, `truncation` = T_max, ramps from B_Z = 3).
 */
export function ec_curve(sites: number, b_x: number, method: string, truncation: number, kp: number, targets: number): string;

/**
 * Lowest `levels` eigenvalues at `count` values of B_Z in [lo, hi].
 */
export function spectrum(sites: number, b_x: number, lo: number, hi: number, count: number, levels: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly asp_fidelity: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly ec_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly spectrum: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
