import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiError, HttpApi } from "../src/api.js";

interface Call {
  url: string;
  init?: RequestInit;
}

function stubFetch(status: number, body: unknown): Call[] {
  const calls: Call[] = [];
  vi.stubGlobal("fetch", async (url: string, init?: RequestInit) => {
    calls.push({ url, init });
    return new Response(body === null ? "" : JSON.stringify(body), {
      status,
      statusText: "whatever",
    });
  });
  return calls;
}

afterEach(() => vi.unstubAllGlobals());

describe("HttpApi", () => {
  it("hits the expected routes", async () => {
    const calls = stubFetch(200, { sessions: [] });
    const api = new HttpApi("http://unit.test");
    await api.listSessions();
    await api.status("s1");
    await api.queries("s1");
    await api.embedding("s1");
    await api.history("s1").catch(() => undefined); // records key missing is fine here
    await api.sample("s1", "a-7");
    expect(calls.map((c) => c.url)).toEqual([
      "http://unit.test/sessions",
      "http://unit.test/sessions/s1/status",
      "http://unit.test/sessions/s1/queries",
      "http://unit.test/sessions/s1/embedding",
      "http://unit.test/sessions/s1/history",
      "http://unit.test/sessions/s1/samples/a-7",
    ]);
    expect(calls.every((c) => (c.init?.method ?? "GET") === "GET")).toBe(true);
  });

  it("posts JSON bodies", async () => {
    const calls = stubFetch(201, { session_id: "s9", phase: "pretraining" });
    const api = new HttpApi();
    await api.createSession({ dataset: "/tmp/d.jsonl", loop: { cap: 3 } });
    expect(calls[0]?.url).toBe("/sessions");
    expect(calls[0]?.init?.method).toBe("POST");
    expect(JSON.parse(String(calls[0]?.init?.body))).toEqual({
      dataset: "/tmp/d.jsonl",
      loop: { cap: 3 },
    });

    await api.submitLabels("s9", { a: 1, b: "walk" });
    expect(JSON.parse(String(calls[1]?.init?.body))).toEqual({
      labels: { a: 1, b: "walk" },
    });
  });

  it("unwraps list and history envelopes", async () => {
    stubFetch(200, { sessions: ["x", "y"] });
    expect(await new HttpApi().listSessions()).toEqual(["x", "y"]);
    vi.unstubAllGlobals();
    stubFetch(200, { records: [{ iteration: 1 }] });
    expect(await new HttpApi().history("s")).toEqual([{ iteration: 1 }]);
  });

  it("maps the error envelope onto ApiError", async () => {
    stubFetch(409, { code: "wrong_phase", message: "busy", detail: null });
    const err = await new HttpApi().queries("s1").catch((e: unknown) => e);
    expect(err).toBeInstanceOf(ApiError);
    const apiErr = err as ApiError;
    expect(apiErr.status).toBe(409);
    expect(apiErr.code).toBe("wrong_phase");
    expect(apiErr.message).toBe("busy");
  });

  it("survives non-JSON error bodies", async () => {
    vi.stubGlobal("fetch", async () => new Response("<html>boom</html>", {
      status: 502,
      statusText: "Bad Gateway",
    }));
    const err = await new HttpApi().status("s1").catch((e: unknown) => e);
    const apiErr = err as ApiError;
    expect(apiErr.status).toBe(502);
    expect(apiErr.code).toBe("http_error");
    expect(apiErr.message).toContain("502");
  });
});
