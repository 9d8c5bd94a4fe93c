/** Pure HTML renderers: every number shown comes verbatim from an API field. */

import { escapeXml, lineChartSvg } from "./chart.js";
import type { ParsedMetrics } from "./metrics.js";
import type { Diagnosis } from "./types.js";

export const DISCLAIMER =
  "For assisted preliminary diagnosis under medical supervision only; " +
  "this tool is not a standalone diagnostic device.";

export const PAGES = [
  { id: "home", title: "Home" },
  { id: "learning", title: "Learning" },
  { id: "about", title: "About" },
  { id: "credits", title: "Credits" },
] as const;

export type PageId = (typeof PAGES)[number]["id"];

export function renderNav(active: PageId): string {
  const links = PAGES.map(
    (page) =>
      `<a href="#/${page.id}" class="${page.id === active ? "active" : ""}">${page.title}</a>`,
  ).join("");
  return `<nav class="topnav">${links}</nav>`;
}

function disclaimerBanner(): string {
  return `<p class="disclaimer">${escapeXml(DISCLAIMER)}</p>`;
}

export function renderDiagnosis(d: Diagnosis, reportUrl: string, previewUrl?: string): string {
  const badgeClass = d.label === "pneumonic" ? "badge positive" : "badge negative";
  const preview = previewUrl
    ? `<img class="preview" src="${escapeXml(previewUrl)}" alt="uploaded X-ray preview"/>`
    : "";
  return (
    `<section class="result" data-result-id="${escapeXml(d.id)}">` +
    preview +
    `<span class="${badgeClass}" data-field="label">${escapeXml(d.label)}</span>` +
    `<dl>` +
    `<dt>Score</dt><dd data-field="score">${d.score.toFixed(3)}</dd>` +
    `<dt>Threshold</dt><dd data-field="threshold">${String(d.threshold)}</dd>` +
    `<dt>Model</dt><dd data-field="fingerprint">${escapeXml(d.model_fingerprint.slice(0, 12))}</dd>` +
    `</dl>` +
    `<a class="report-link" href="${escapeXml(reportUrl)}" target="_blank">Download report (JSON)</a> ` +
    `<a class="report-link" href="${escapeXml(reportUrl)}/html" target="_blank">Printable view</a>` +
    disclaimerBanner() +
    `</section>`
  );
}

export function renderError(message: string): string {
  // error states carry no partial result fields
  return `<section class="error"><p role="alert">${escapeXml(message)}</p>${disclaimerBanner()}</section>`;
}

export function renderBusy(): string {
  return `<section class="busy"><p>Analyzing…</p></section>`;
}

export function renderHomePage(resultHtml = ""): string {
  return (
    `<section class="page" data-page="home">` +
    `<h1>Lung X-ray screening</h1>` +
    `<p>Select a chest X-ray image. It is converted to grayscale PGM in your ` +
    `browser and sent to the diagnosis service; nothing is uploaded in any other format.</p>` +
    `<form id="upload-form">` +
    `<input type="file" id="file-input" accept="image/*"/>` +
    `</form>` +
    `<div id="result">${resultHtml}</div>` +
    `</section>`
  );
}

export function renderLearningPage(metrics: ParsedMetrics | null, error?: string): string {
  let body: string;
  if (error) {
    body = renderError(error);
  } else if (!metrics || metrics.points.length === 0) {
    body = `<p class="empty">No training run recorded.</p>`;
  } else {
    const xs = metrics.points.map((p) => p.epoch);
    const loss = lineChartSvg("Training loss", xs, [
      { name: "loss", ys: metrics.points.map((p) => p.loss), color: "#b33" },
    ]);
    const accSeries = [
      { name: "accuracy", ys: metrics.points.map((p) => p.accuracy), color: "#36b" },
    ];
    if (metrics.points.every((p) => typeof p.val_accuracy === "number")) {
      accSeries.push({
        name: "val accuracy",
        ys: metrics.points.map((p) => p.val_accuracy as number),
        color: "#393",
      });
    }
    const acc = lineChartSvg("Training accuracy", xs, accSeries);
    const note =
      metrics.skipped > 0
        ? `<p class="note">${metrics.skipped} malformed line(s) skipped.</p>`
        : "";
    body = `${loss}${acc}${note}`;
  }
  return (
    `<section class="page" data-page="learning">` +
    `<h1>Transfer learning</h1>` +
    `<p>The feature-extraction blocks are reused frozen; only the classifier head ` +
    `is trained on the labeled X-rays. Each point below is one training epoch as ` +
    `reported by the service.</p>` +
    body +
    `</section>`
  );
}

export function renderAboutPage(): string {
  return (
    `<section class="page" data-page="about">` +
    `<h1>About</h1>` +
    `<p>This application pairs a clinician with a convolutional neural network: ` +
    `the model proposes a preliminary reading of a chest X-ray and the medical ` +
    `practitioner reviews, confirms, or overrules it. The intelligence is extended, ` +
    `not replaced.</p>` +
    `<p>The classifier is a VGG-16-style network. Its convolutional blocks act as a ` +
    `fixed feature extractor while a small classification head is trained to ` +
    `separate pneumonic from non-pneumonic studies.</p>` +
    disclaimerBanner() +
    `</section>`
  );
}

export function renderCreditsPage(): string {
  return (
    `<section class="page" data-page="credits">` +
    `<h1>Credits</h1>` +
    `<p>Built on the open ecosystem: numpy-backed inference engine, FastAPI service, ` +
    `and this dependency-free TypeScript front end.</p>` +
    `<p>Training imagery comes from openly licensed chest X-ray collections; thanks to ` +
    `their maintainers and to the clinicians who labeled them.</p>` +
    `</section>`
  );
}
