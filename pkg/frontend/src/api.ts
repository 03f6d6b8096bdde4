/** Typed client for the segment-search JSON API (same-origin). */

export interface DomainInfo {
  domain_id: string;
  label: string;
  concept_count: number;
}

export interface TreeNode {
  id: string;
  label: string;
  children: TreeNode[];
}

export interface TreePayload {
  domain_id: string;
  label: string;
  roots: TreeNode[];
}

export interface ResultPob {
  pob_id: string;
  kind: string;
  concepts: string[];
  comment?: string;
}

export interface SearchResult {
  lesson_id: string;
  segment_id: string;
  score: number;
  lesson_title: string;
  segment_title: string;
  /** seconds from lesson start */
  begin: number;
  /** seconds */
  duration: number;
  url: string;
  pobs: ResultPob[];
}

export interface SearchRequest {
  domain_id: string;
  concepts: string[];
  pob?: string;
  expand?: string[];
  top?: number;
}

interface ErrorEnvelope {
  code: string;
  message: string;
  detail?: unknown;
}

/** A non-2xx response; `message` is the server's human-readable text. */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function request<T>(
  path: string,
  init: RequestInit,
  fetchImpl: typeof fetch,
): Promise<T> {
  const response = await fetchImpl(path, {
    ...init,
    headers: { accept: "application/json", ...init.headers },
  });
  if (!response.ok) {
    let envelope: Partial<ErrorEnvelope> = {};
    try {
      envelope = (await response.json()) as Partial<ErrorEnvelope>;
    } catch {
      // non-JSON error body (proxy page, empty); fall through to defaults
    }
    throw new ApiError(
      response.status,
      envelope.code ?? "http-error",
      envelope.message ?? `request failed with status ${response.status}`,
    );
  }
  return (await response.json()) as T;
}

/**
 * All calls go through one instance so tests can hand in a stub `fetch`
 * and the app can keep a single place for base behaviour.
 */
export class ApiClient {
  constructor(private readonly fetchImpl: typeof fetch = fetch) {}

  async listDomains(): Promise<DomainInfo[]> {
    const payload = await request<{ domains: DomainInfo[] }>(
      "/api/domains",
      {},
      this.fetchImpl,
    );
    return payload.domains;
  }

  domainTree(domainId: string): Promise<TreePayload> {
    return request<TreePayload>(
      `/api/domains/${encodeURIComponent(domainId)}/tree`,
      {},
      this.fetchImpl,
    );
  }

  search(
    body: SearchRequest,
    signal?: AbortSignal,
  ): Promise<{ results: SearchResult[] }> {
    return request<{ results: SearchResult[] }>(
      "/api/search",
      {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(body),
        signal,
      },
      this.fetchImpl,
    );
  }
}
