/** Thin client for the diagnosis service; fetch is injectable for tests. */

import type { Diagnosis } from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    message: string,
    readonly status: number | null = null,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  async diagnose(pgm: Uint8Array): Promise<Diagnosis> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/api/diagnose`, {
        method: "POST",
        headers: { "Content-Type": "application/octet-stream" },
        body: pgm as unknown as BodyInit,
      });
    } catch (err) {
      throw new ApiError(`cannot reach the diagnosis service: ${String(err)}`);
    }
    if (!response.ok) {
      throw new ApiError(await describeFailure(response), response.status);
    }
    return (await response.json()) as Diagnosis;
  }

  async metricsText(): Promise<string> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.baseUrl}/api/metrics`);
    } catch (err) {
      throw new ApiError(`cannot reach the diagnosis service: ${String(err)}`);
    }
    if (!response.ok) {
      throw new ApiError(await describeFailure(response), response.status);
    }
    return response.text();
  }

  async health(): Promise<{ status: string; model_fingerprint: string; uptime: number }> {
    const response = await this.fetchImpl(`${this.baseUrl}/health`);
    if (!response.ok) {
      throw new ApiError(await describeFailure(response), response.status);
    }
    return response.json();
  }

  reportUrl(id: string): string {
    return `${this.baseUrl}/api/report/${id}`;
  }

  reportHtmlUrl(id: string): string {
    return `${this.baseUrl}/api/report/${id}/html`;
  }
}

async function describeFailure(response: Response): Promise<string> {
  let detail = "";
  try {
    const body = (await response.json()) as { error?: string };
    if (body && typeof body.error === "string") detail = `: ${body.error}`;
  } catch {
    // non-JSON error body; the status line is enough
  }
  return `service returned ${response.status}${detail}`;
}
