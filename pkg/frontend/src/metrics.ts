/** Tolerant parsing of the /api/metrics JSON-lines stream. */

import type { EpochPoint } from "./types.js";

export interface ParsedMetrics {
  points: EpochPoint[];
  skipped: number;
}

export function parseMetricsLines(text: string): ParsedMetrics {
  const points: EpochPoint[] = [];
  let skipped = 0;
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed) continue;
    const point = tryParsePoint(trimmed);
    if (point) {
      points.push(point);
    } else {
      skipped += 1;
      console.warn(`skipping malformed metrics line: ${trimmed}`);
    }
  }
  return { points, skipped };
}

function tryParsePoint(line: string): EpochPoint | null {
  let raw: unknown;
  try {
    raw = JSON.parse(line);
  } catch {
    return null;
  }
  if (typeof raw !== "object" || raw === null) return null;
  const record = raw as Record<string, unknown>;
  if (
    typeof record.epoch !== "number" ||
    typeof record.loss !== "number" ||
    typeof record.accuracy !== "number"
  ) {
    return null;
  }
  const point: EpochPoint = {
    epoch: record.epoch,
    loss: record.loss,
    accuracy: record.accuracy,
  };
  if (typeof record.val_accuracy === "number") point.val_accuracy = record.val_accuracy;
  return point;
}
