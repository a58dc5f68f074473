/* tslint:disable */
/* eslint-disable */

/**
 * A rendered stimulus: RGBA pixels plus its manifest entry as JSON.
 */
export class Stimulus {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    entryJson(): string;
    rgba(): Uint8Array;
    readonly height: number;
    readonly label: string;
    readonly width: number;
}

/**
 * Condition labels of a family, in the order `renderStimulus` indexes them.
 */
export function conditionLabels(family_slug: string): string[];

export function maxDistractors(family_slug: string): number;

export function promptFor(entry_json: string, mode: string): string;

export function renderStimulus(family_slug: string, condition: number, n_distractors: number, seed: bigint): Stimulus;

export function scoreReply(entry_json: string, reply: string, mode: string): string;

/**
 * `[low, high]` of the 95% Wilson interval.
 */
export function wilson95(successes: number, trials: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_stimulus_free: (a: number, b: number) => void;
    readonly conditionLabels: (a: number, b: number) => [number, number, number, number];
    readonly maxDistractors: (a: number, b: number) => [number, number, number];
    readonly promptFor: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly renderStimulus: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly scoreReply: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly stimulus_entryJson: (a: number) => [number, number];
    readonly stimulus_height: (a: number) => number;
    readonly stimulus_label: (a: number) => [number, number];
    readonly stimulus_rgba: (a: number) => [number, number];
    readonly stimulus_width: (a: number) => number;
    readonly wilson95: (a: number, b: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
