import { describe, expect, it } from "vitest";

import { parseMetricsLines } from "./metrics.js";
import type { Diagnosis } from "./types.js";
import {
  DISCLAIMER,
  renderDiagnosis,
  renderError,
  renderLearningPage,
  renderNav,
} from "./views.js";

const SAMPLE: Diagnosis = {
  id: "abc123",
  label: "pneumonic",
  score: 0.8125,
  threshold: 0.5,
  model_fingerprint: "fingerprint0123456789",
  timestamp: "2024-01-01T00:00:00+00:00",
};

describe("renderNav", () => {
  it("links all four pages and marks the active one", () => {
    const html = renderNav("learning");
    for (const title of ["Home", "Learning", "About", "Credits"]) {
      expect(html).toContain(`>${title}</a>`);
    }
    expect(html).toContain('href="#/learning" class="active"');
  });
});

describe("renderDiagnosis", () => {
  it("shows label and score verbatim from the response", () => {
    const html = renderDiagnosis(SAMPLE, "http://x/api/report/abc123");
    expect(html).toContain(">pneumonic</span>");
    expect(html).toContain("0.813"); // toFixed(3) of the response score
    expect(html).toContain('data-field="threshold">0.5<');
    expect(html).toContain("http://x/api/report/abc123");
  });

  it("always carries the supervision disclaimer", () => {
    expect(renderDiagnosis(SAMPLE, "u")).toContain(DISCLAIMER.slice(0, 40));
    expect(renderError("whatever")).toContain(DISCLAIMER.slice(0, 40));
  });

  it("escapes markup in API-provided strings", () => {
    const hostile = { ...SAMPLE, label: "<script>alert(1)</script>" };
    const html = renderDiagnosis(hostile, "u");
    expect(html).not.toContain("<script>");
  });
});

describe("renderError", () => {
  it("contains no partial result fields", () => {
    const html = renderError("service returned 500");
    expect(html).toContain("service returned 500");
    expect(html).not.toContain('data-field="score"');
    expect(html).not.toContain('data-field="label"');
  });
});

describe("renderLearningPage", () => {
  it("renders one chart point per metrics line for each series", () => {
    const metrics = parseMetricsLines(
      '{"epoch": 1, "loss": 0.7, "accuracy": 0.5}\n' +
        '{"epoch": 2, "loss": 0.6, "accuracy": 0.7}\n' +
        '{"epoch": 3, "loss": 0.5, "accuracy": 0.9}\n',
    );
    const html = renderLearningPage(metrics);
    expect(html.match(/data-series="loss"/g)).toHaveLength(3);
    expect(html.match(/data-series="accuracy"/g)).toHaveLength(3);
  });

  it("reports the empty state", () => {
    expect(renderLearningPage({ points: [], skipped: 0 })).toContain(
      "No training run recorded.",
    );
  });

  it("renders a monotone loss fixture as monotone chart data", () => {
    const metrics = parseMetricsLines(
      '{"epoch": 1, "loss": 0.9, "accuracy": 0.5}\n' +
        '{"epoch": 2, "loss": 0.6, "accuracy": 0.6}\n' +
        '{"epoch": 3, "loss": 0.3, "accuracy": 0.7}\n',
    );
    const html = renderLearningPage(metrics);
    const cys = [...html.matchAll(/data-series="loss"[^/]*cy="([0-9.]+)"/g)].map((m) =>
      parseFloat(m[1]),
    );
    expect(cys).toHaveLength(3);
    // decreasing loss means increasing y pixel coordinate (origin is top-left)
    expect(cys[0]).toBeLessThan(cys[1]);
    expect(cys[1]).toBeLessThan(cys[2]);
  });
});
