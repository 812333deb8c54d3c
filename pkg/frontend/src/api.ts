/**
 * Typed client for the annotation service.
 *
 * The overlay is configured entirely through query parameters, so a
 * deployment can point one bundle at any paper and service instance.
 */

import type {
  DeclutterPayload,
  DefinitionView,
  DiagramPayload,
  EntitiesPayload,
  GlossaryPayload,
  ListKind,
  ListPayload,
} from "./types";

export interface ClientConfig {
  /** Service base URL, without a trailing slash. */
  base: string;
  /** Paper identifier the overlay should load. */
  paper: string;
}

export const CONFIG_DEFAULTS: ClientConfig = { base: "", paper: "paper" };

/** Parse `?paper=...&service=...` from a location search string. */
export function configFromQuery(search: string): ClientConfig {
  const params = new URLSearchParams(search);
  const base = params.get("service") ?? CONFIG_DEFAULTS.base;
  return {
    base: base.endsWith("/") ? base.slice(0, -1) : base,
    paper: params.get("paper") ?? CONFIG_DEFAULTS.paper,
  };
}

export interface FetchResponse {
  ok: boolean;
  status: number;
  json(): Promise<unknown>;
}

export type FetchLike = (url: string) => Promise<FetchResponse>;

export class ApiError extends Error {
  readonly status: number;

  constructor(status: number, message: string) {
    super(message);
    this.status = status;
  }
}

export class ReaderClient {
  private readonly config: ClientConfig;
  private readonly fetchImpl: FetchLike;

  constructor(config: ClientConfig, fetchImpl?: FetchLike) {
    this.config = config;
    this.fetchImpl =
      fetchImpl ?? ((url: string) => globalThis.fetch(url) as Promise<FetchResponse>);
  }

  url(path: string): string {
    return `${this.config.base}/v1/papers/${this.config.paper}${path}`;
  }

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchImpl(this.url(path));
    if (!response.ok) {
      let detail = `request failed with status ${response.status}`;
      try {
        const body = (await response.json()) as { detail?: string };
        if (typeof body.detail === "string") {
          detail = body.detail;
        }
      } catch {
        /* non-JSON error body; keep the generic message */
      }
      throw new ApiError(response.status, detail);
    }
    return (await response.json()) as T;
  }

  entities(): Promise<EntitiesPayload> {
    return this.get("/entities");
  }

  definition(entity: string, position: number): Promise<DefinitionView> {
    return this.get(`/entities/${entity}/definition?position=${position}`);
  }

  list(entity: string, kind: ListKind): Promise<ListPayload> {
    return this.get(`/entities/${entity}/${kind}`);
  }

  declutter(entity: string): Promise<DeclutterPayload> {
    return this.get(`/entities/${entity}/declutter`);
  }

  diagram(equation: string): Promise<DiagramPayload> {
    return this.get(`/equations/${equation}/diagram`);
  }

  glossary(): Promise<GlossaryPayload> {
    return this.get("/glossary");
  }
}

/**
 * Discards responses that arrive after the selection has moved on.
 *
 * Every selection change calls `begin()` and tags its in-flight requests
 * with the returned token; `settle` resolves to null for any token that
 * is no longer current, so a slow response for an old selection can
 * never clobber the interface state of a newer one.
 */
export class SelectionGate {
  private generation = 0;

  begin(): number {
    this.generation += 1;
    return this.generation;
  }

  isCurrent(token: number): boolean {
    return token === this.generation;
  }

  async settle<T>(token: number, work: Promise<T>): Promise<T | null> {
    const value = await work;
    return this.isCurrent(token) ? value : null;
  }
}
