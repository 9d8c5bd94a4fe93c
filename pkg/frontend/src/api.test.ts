import { describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "./api.js";

const DIAGNOSIS = {
  id: "id1",
  label: "not_pneumonic",
  score: 0.25,
  threshold: 0.5,
  model_fingerprint: "fp",
  timestamp: "t",
};

describe("ApiClient.diagnose", () => {
  it("posts raw bytes to /api/diagnose and returns the parsed body", async () => {
    const fetchImpl = vi.fn(
      async () => new Response(JSON.stringify(DIAGNOSIS), { status: 200 }),
    );
    const api = new ApiClient("http://svc:8000", fetchImpl);
    const body = new Uint8Array([80, 53]);
    const result = await api.diagnose(body);
    expect(result).toEqual(DIAGNOSIS);
    expect(fetchImpl).toHaveBeenCalledWith(
      "http://svc:8000/api/diagnose",
      expect.objectContaining({ method: "POST", body }),
    );
  });

  it("raises ApiError with the service's error detail on 4xx", async () => {
    const fetchImpl = vi.fn(
      async () =>
        new Response(JSON.stringify({ error: "malformed image" }), { status: 400 }),
    );
    const api = new ApiClient("http://svc", fetchImpl);
    await expect(api.diagnose(new Uint8Array())).rejects.toThrow(/400.*malformed image/);
  });

  it("wraps network failures as ApiError", async () => {
    const api = new ApiClient("http://svc", async () => {
      throw new TypeError("fetch failed");
    });
    const err = await api.diagnose(new Uint8Array()).catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBeNull();
  });
});

describe("ApiClient.metricsText", () => {
  it("returns the raw stream", async () => {
    const api = new ApiClient(
      "http://svc",
      async () => new Response('{"epoch": 1}\n', { status: 200 }),
    );
    expect(await api.metricsText()).toBe('{"epoch": 1}\n');
  });
});

describe("report links", () => {
  it("derive from the diagnosis id", () => {
    const api = new ApiClient("http://svc");
    expect(api.reportUrl("xyz")).toBe("http://svc/api/report/xyz");
    expect(api.reportHtmlUrl("xyz")).toBe("http://svc/api/report/xyz/html");
  });
});
