import { readFileSync, writeFileSync } from "node:fs";

import { ShapeError } from "./errors.js";

/**
 * Validate a rectangular 2-D numeric array and return its dimensions.
 */
export function matrixShape(X: unknown): [number, number] {
  if (!Array.isArray(X) || X.length === 0 || !Array.isArray(X[0])) {
    throw new ShapeError("expected a non-empty 2-D array of numbers");
  }
  const cols = (X[0] as unknown[]).length;
  if (cols === 0) {
    throw new ShapeError("rows must have at least one column");
  }
  for (const row of X as unknown[][]) {
    if (!Array.isArray(row) || row.length !== cols) {
      throw new ShapeError(
        `ragged or non-array row: expected ${cols} columns per row`,
      );
    }
    for (const v of row) {
      if (typeof v !== "number" || !Number.isFinite(v)) {
        throw new ShapeError(`non-finite or non-numeric entry: ${String(v)}`);
      }
    }
  }
  return [X.length, cols];
}

/**
 * Write a matrix as the header CSV the backend loaders expect.
 *
 * JavaScript's default number formatting is shortest-round-trip, so the
 * float64 values survive the text boundary bit-exactly.
 */
export function writeMatrixCsv(path: string, X: number[][]): void {
  const cols = X[0].length;
  const header = Array.from({ length: cols }, (_, j) => `x${j}`).join(",");
  const lines = [header];
  for (const row of X) {
    lines.push(row.map((v) => String(v)).join(","));
  }
  writeFileSync(path, lines.join("\n") + "\n", "utf-8");
}

/**
 * Read a single-column label CSV (header `cluster`) into integers.
 */
export function readLabelCsv(path: string): number[] {
  const lines = readFileSync(path, "utf-8").trim().split(/\r?\n/);
  if (lines[0] !== "cluster") {
    throw new Error(`expected 'cluster' header in ${path}, got '${lines[0]}'`);
  }
  return lines.slice(1).map((line) => {
    const v = Number(line);
    if (!Number.isInteger(v) || v < 0) {
      throw new Error(`bad cluster id '${line}' in ${path}`);
    }
    return v;
  });
}

/**
 * Read a numeric CSV with a header row; optionally split out a label column.
 */
export function readMatrixCsv(
  path: string,
  labelColumn?: string,
): { X: number[][]; labels: number[] | null } {
  const lines = readFileSync(path, "utf-8").trim().split(/\r?\n/);
  const header = lines[0].split(",").map((h) => h.trim());
  const labelIdx = labelColumn === undefined ? -1 : header.indexOf(labelColumn);
  if (labelColumn !== undefined && labelIdx < 0) {
    throw new Error(`label column '${labelColumn}' not found in ${path}`);
  }
  const X: number[][] = [];
  const labels: number[] = [];
  for (const line of lines.slice(1)) {
    const cells = line.split(",");
    const row: number[] = [];
    cells.forEach((cell, j) => {
      const v = Number(cell);
      if (j === labelIdx) {
        labels.push(v);
      } else {
        row.push(v);
      }
    });
    X.push(row);
  }
  return { X, labels: labelIdx >= 0 ? labels : null };
}
