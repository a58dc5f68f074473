/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_stimulus_free: (a: number, b: number) => void;
export const conditionLabels: (a: number, b: number) => [number, number, number, number];
export const maxDistractors: (a: number, b: number) => [number, number, number];
export const promptFor: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const renderStimulus: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const scoreReply: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const stimulus_entryJson: (a: number) => [number, number];
export const stimulus_height: (a: number) => number;
export const stimulus_label: (a: number) => [number, number];
export const stimulus_rgba: (a: number) => [number, number];
export const stimulus_width: (a: number) => number;
export const wilson95: (a: number, b: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __externref_drop_slice: (a: number, b: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
