export { PSC } from "./psc.js";
export type { PscOptions } from "./psc.js";
export { BackendError, NotFittedError, ShapeError } from "./errors.js";
export { readLabelCsv, readMatrixCsv, writeMatrixCsv } from "./csv.js";
