import { describe, expect, it } from "vitest";

import {
  ApiError,
  configFromQuery,
  ReaderClient,
  SelectionGate,
  type FetchLike,
} from "../src/api";

function fakeFetch(
  handler: (url: string) => { status: number; body: unknown },
): { fetch: FetchLike; calls: string[] } {
  const calls: string[] = [];
  const fetch: FetchLike = (url) => {
    calls.push(url);
    const { status, body } = handler(url);
    return Promise.resolve({
      ok: status >= 200 && status < 300,
      status,
      json: () => Promise.resolve(body),
    });
  };
  return { fetch, calls };
}

describe("configFromQuery", () => {
  it("reads paper and service from the query string", () => {
    const config = configFromQuery("?paper=mixture&service=http://localhost:8000");
    expect(config).toEqual({ base: "http://localhost:8000", paper: "mixture" });
  });

  it("strips a trailing slash from the service base", () => {
    expect(configFromQuery("?service=http://api/").base).toBe("http://api");
  });

  it("falls back to defaults when parameters are absent", () => {
    expect(configFromQuery("")).toEqual({ base: "", paper: "paper" });
  });
});

describe("ReaderClient", () => {
  it("builds versioned paper-scoped urls", async () => {
    const { fetch, calls } = fakeFetch(() => ({ status: 200, body: {} }));
    const client = new ReaderClient({ base: "http://api", paper: "mixture" }, fetch);
    await client.entities();
    await client.definition("s1", 120);
    await client.list("s1", "usages");
    await client.declutter("s1");
    await client.diagram("q3");
    await client.glossary();
    expect(calls).toEqual([
      "http://api/v1/papers/mixture/entities",
      "http://api/v1/papers/mixture/entities/s1/definition?position=120",
      "http://api/v1/papers/mixture/entities/s1/usages",
      "http://api/v1/papers/mixture/entities/s1/declutter",
      "http://api/v1/papers/mixture/equations/q3/diagram",
      "http://api/v1/papers/mixture/glossary",
    ]);
  });

  it("surfaces service error details as ApiError", async () => {
    const { fetch } = fakeFetch(() => ({
      status: 404,
      body: { detail: "unknown entity s99" },
    }));
    const client = new ReaderClient({ base: "", paper: "mixture" }, fetch);
    const failure = await client.entities().catch((err: unknown) => err);
    expect(failure).toBeInstanceOf(ApiError);
    expect((failure as ApiError).status).toBe(404);
    expect((failure as ApiError).message).toBe("unknown entity s99");
  });
});

describe("SelectionGate", () => {
  it("keeps responses for the current selection", async () => {
    const gate = new SelectionGate();
    const token = gate.begin();
    await expect(gate.settle(token, Promise.resolve("view"))).resolves.toBe("view");
  });

  it("discards a slow response once a newer selection begins", async () => {
    const gate = new SelectionGate();
    const stale = gate.begin();
    let releaseFirst: (value: string) => void = () => undefined;
    const slow = new Promise<string>((resolve) => {
      releaseFirst = resolve;
    });
    const pending = gate.settle(stale, slow);

    const fresh = gate.begin();
    const kept = await gate.settle(fresh, Promise.resolve("new selection"));
    expect(kept).toBe("new selection");

    releaseFirst("old selection");
    await expect(pending).resolves.toBeNull();
  });

  it("treats every older token as stale, not just the previous one", async () => {
    const gate = new SelectionGate();
    const tokens = [gate.begin(), gate.begin(), gate.begin()];
    expect(gate.isCurrent(tokens[0])).toBe(false);
    expect(gate.isCurrent(tokens[1])).toBe(false);
    expect(gate.isCurrent(tokens[2])).toBe(true);
    await expect(gate.settle(tokens[0], Promise.resolve(1))).resolves.toBeNull();
    await expect(gate.settle(tokens[2], Promise.resolve(3))).resolves.toBe(3);
  });
});
