/**
 * Error thrown when predict() is called before fit().
 */
export class NotFittedError extends Error {
  override name = "NotFittedError";
}

/**
 * Error thrown when an input array has the wrong shape, e.g. a 1-D array
 * passed to fit() or a predict() matrix whose column count does not match
 * the fitted width.
 */
export class ShapeError extends Error {
  override name = "ShapeError";
}

/**
 * Error carrying the diagnostic line of a failed backend invocation.
 */
export class BackendError extends Error {
  override name = "BackendError";

  /** Exit code of the backend process, if it ran at all. */
  readonly exitCode: number | null;

  constructor(message: string, exitCode: number | null) {
    super(message);
    this.exitCode = exitCode;
  }
}
