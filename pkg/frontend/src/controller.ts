/** Page flows wired to the API client; pure string in/out for testability. */

import { ApiClient, ApiError } from "./api.js";
import { MAX_UPLOAD_BYTES } from "./pgm.js";
import { parseMetricsLines } from "./metrics.js";
import { renderDiagnosis, renderError, renderLearningPage } from "./views.js";

export async function diagnoseFlow(
  api: ApiClient,
  pgm: Uint8Array,
  previewUrl?: string,
): Promise<string> {
  if (pgm.byteLength > MAX_UPLOAD_BYTES) {
    return renderError(
      `File is too large to upload (${pgm.byteLength} bytes; limit ${MAX_UPLOAD_BYTES}).`,
    );
  }
  try {
    const diagnosis = await api.diagnose(pgm);
    return renderDiagnosis(diagnosis, api.reportUrl(diagnosis.id), previewUrl);
  } catch (err) {
    return renderError(describe(err));
  }
}

export async function learningFlow(api: ApiClient): Promise<string> {
  try {
    const text = await api.metricsText();
    return renderLearningPage(parseMetricsLines(text));
  } catch (err) {
    return renderLearningPage(null, describe(err));
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) return err.message;
  return `unexpected error: ${String(err)}`;
}
