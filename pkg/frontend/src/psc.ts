import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

import { matrixShape, readLabelCsv, writeMatrixCsv } from "./csv.js";
import { BackendError, NotFittedError, ShapeError } from "./errors.js";

/**
 * Constructor options.  Names mirror the backend CLI flags one-to-one
 * (camelCased): k, p, rate, sigma, hidden, epochs, batchSize,
 * learningRate, seed, standardize.
 */
export interface PscOptions {
  /** Cluster count for predict(). */
  k: number;
  /** Embedding width; defaults to k. */
  p?: number;
  /** Training sampling rate in (0, 1]. */
  rate?: number;
  /** Gaussian kernel bandwidth, or "auto" for the median heuristic. */
  sigma?: number | "auto";
  /** Hidden layer widths of the regressor. */
  hidden?: [number, number, number];
  epochs?: number;
  batchSize?: number;
  learningRate?: number;
  seed?: number;
  /** Standardize features at fit time; the scaler ships with the model. */
  standardize?: boolean;
}

interface Resolved {
  k: number;
  p: number;
  rate: number;
  sigma: number | "auto";
  hidden: [number, number, number];
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
  standardize: boolean;
}

/** Backend command; override with the PSCLUSTER_BIN environment variable. */
function backendCommand(): string[] {
  const bin = process.env.PSCLUSTER_BIN;
  if (bin) {
    return bin.split(" ");
  }
  return ["pscluster"];
}

function runBackend(args: string[]): void {
  const [cmd, ...prefix] = backendCommand();
  const proc = spawnSync(cmd, [...prefix, ...args], { encoding: "utf-8" });
  if (proc.error) {
    throw new BackendError(
      `failed to launch backend '${cmd}': ${proc.error.message}`,
      null,
    );
  }
  if (proc.status !== 0) {
    const diag = (proc.stderr || proc.stdout || "").trim().split("\n").pop();
    throw new BackendError(
      `backend exited with ${proc.status}: ${diag}`,
      proc.status,
    );
  }
}

/**
 * Parametric spectral clustering estimator.
 *
 * fit(X) trains the embedding regressor through the backend CLI and keeps
 * the resulting model file; predict(X) embeds and clusters rows with the
 * trained model.  No numeric work happens on this side of the boundary
 * beyond array marshaling to CSV.
 */
export class PSC {
  private readonly options: Resolved;
  private workDir: string | null = null;
  private modelPath: string | null = null;
  private fittedWidth: number | null = null;

  constructor(options: PscOptions) {
    if (!Number.isInteger(options.k) || options.k < 1) {
      throw new RangeError(`k must be a positive integer, got ${options.k}`);
    }
    this.options = {
      k: options.k,
      p: options.p ?? options.k,
      rate: options.rate ?? 1.0,
      sigma: options.sigma ?? "auto",
      hidden: options.hidden ?? [32, 64, 32],
      epochs: options.epochs ?? 200,
      batchSize: options.batchSize ?? 64,
      learningRate: options.learningRate ?? 1e-3,
      seed: options.seed ?? 0,
      standardize: options.standardize ?? false,
    };
  }

  /** Model file of the last fit, or null before fit(). */
  get model(): string | null {
    return this.modelPath;
  }

  /**
   * Train on the rows of X.  A second fit() fully replaces the first
   * model (fresh working directory and model file).
   */
  fit(X: number[][]): this {
    const [, cols] = matrixShape(X);
    this.dispose();
    this.workDir = mkdtempSync(join(tmpdir(), "pscluster-"));
    const dataPath = join(this.workDir, "train.csv");
    const modelPath = join(this.workDir, "model.psc");
    writeMatrixCsv(dataPath, X);
    const o = this.options;
    const args = [
      "psc-train",
      "--input", dataPath,
      "--rate", String(o.rate),
      "--p", String(o.p),
      "--sigma", String(o.sigma),
      "--hidden", o.hidden.join(","),
      "--epochs", String(o.epochs),
      "--batch-size", String(o.batchSize),
      "--learning-rate", String(o.learningRate),
      "--seed", String(o.seed),
      "--model", modelPath,
    ];
    if (o.standardize) {
      args.push("--standardize");
    }
    runBackend(args);
    this.modelPath = modelPath;
    this.fittedWidth = cols;
    return this;
  }

  /**
   * Cluster the rows of X with the fitted model; returns cluster IDs in
   * [0, k).  X may contain the training rows plus newly arrived rows:
   * every row is embedded through the parametric map and the whole set is
   * clustered, which is exactly the backend's incremental recluster-all
   * behavior.
   */
  predict(X: number[][]): number[] {
    if (this.modelPath === null || this.workDir === null) {
      throw new NotFittedError("predict() called before fit()");
    }
    const [, cols] = matrixShape(X);
    if (cols !== this.fittedWidth) {
      throw new ShapeError(
        `expected ${this.fittedWidth} columns (fitted width), got ${cols}`,
      );
    }
    const dataPath = join(this.workDir, "predict.csv");
    const labelsPath = join(this.workDir, "labels.csv");
    writeMatrixCsv(dataPath, X);
    runBackend([
      "psc-predict",
      "--model", this.modelPath,
      "--input", dataPath,
      "--k", String(this.options.k),
      "--seed", String(this.options.seed),
      "--out", labelsPath,
    ]);
    return readLabelCsv(labelsPath);
  }

  /** Remove the temporary working directory of the current model. */
  dispose(): void {
    if (this.workDir !== null) {
      rmSync(this.workDir, { recursive: true, force: true });
      this.workDir = null;
      this.modelPath = null;
      this.fittedWidth = null;
    }
  }
}
