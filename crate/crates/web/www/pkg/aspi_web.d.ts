/* tslint:disable */
/* eslint-disable */

/**
 * JSON list of `{n, value, bits, overflow}` for `n` in `0..=n_max`.
 */
export function eval_curve(hierarchy: string, ordinal: string, n_max: number, max_bits: number): string;

/**
 * JSON list of the first `count` entries `λ[0], λ[1], …`.
 */
export function fundamental_sequence(ordinal: string, count: number): string;

/**
 * JSON transcript and verdict of one game.
 */
export function play_game(predictor: string, evader: string, horizon: number, window: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly eval_curve: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly fundamental_sequence: (a: number, b: number, c: number) => [number, number, number, number];
    readonly play_game: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
