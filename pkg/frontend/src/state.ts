/**
 * Pure state layer: every transition is a function of (previous state,
 * event) with API responses arriving as plain events.  Nothing in here
 * touches the DOM or the network, so the whole layer runs headless.
 */

import type { SearchRequest, SearchResult } from "./api.js";

export type Phase = "idle" | "loading" | "results" | "error";

export interface QueryState {
  readonly domainId: string | null;
  /** checked concept ids, in click order, no duplicates */
  readonly checked: readonly string[];
  readonly pob: string | null;
  /** relation kinds to expand the query along */
  readonly expand: readonly string[];
  readonly top: number | null;
  /** tree branches the user folded shut */
  readonly collapsed: readonly string[];
  readonly phase: Phase;
  readonly results: readonly SearchResult[];
  /** banner text for a failed search, null when none */
  readonly error: string | null;
  /** banner text for a failed tree fetch (retryable), null when none */
  readonly treeError: string | null;
  /** id of the most recently issued search; stale responses are dropped */
  readonly searchSeq: number;
}

export const initialState: QueryState = {
  domainId: null,
  checked: [],
  pob: null,
  expand: [],
  top: null,
  collapsed: [],
  phase: "idle",
  results: [],
  error: null,
  treeError: null,
  searchSeq: 0,
};

export type UiEvent =
  | { type: "domain-selected"; domainId: string | null }
  | { type: "tree-loaded" }
  | { type: "tree-failed"; message: string }
  | { type: "concept-toggled"; conceptId: string }
  | { type: "branch-toggled"; conceptId: string }
  | { type: "pob-set"; pob: string | null }
  | { type: "expand-toggled"; kind: string }
  | { type: "top-set"; top: number | null }
  | { type: "search-started" }
  | { type: "search-succeeded"; seq: number; results: SearchResult[] }
  | { type: "search-failed"; seq: number; message: string };

function toggle(list: readonly string[], item: string): readonly string[] {
  return list.includes(item)
    ? list.filter((x) => x !== item)
    : [...list, item];
}

export function reduce(state: QueryState, event: UiEvent): QueryState {
  switch (event.type) {
    case "domain-selected":
      // Concepts (and the tree they came from) are domain-specific; the
      // POB/expansion/top settings are not, so those survive the switch.
      return {
        ...state,
        domainId: event.domainId,
        checked: [],
        collapsed: [],
        phase: "idle",
        results: [],
        error: null,
        treeError: null,
      };
    case "tree-loaded":
      return { ...state, treeError: null };
    case "tree-failed":
      return { ...state, treeError: event.message };
    case "concept-toggled":
      return { ...state, checked: toggle(state.checked, event.conceptId) };
    case "branch-toggled":
      return { ...state, collapsed: toggle(state.collapsed, event.conceptId) };
    case "pob-set":
      return { ...state, pob: event.pob };
    case "expand-toggled":
      return { ...state, expand: toggle(state.expand, event.kind) };
    case "top-set":
      return { ...state, top: event.top };
    case "search-started":
      return {
        ...state,
        phase: "loading",
        error: null,
        searchSeq: state.searchSeq + 1,
      };
    case "search-succeeded":
      if (event.seq !== state.searchSeq) {
        return state; // answer to a search the user has since superseded
      }
      // Results are stored exactly as the API ordered them.
      return { ...state, phase: "results", results: event.results };
    case "search-failed":
      if (event.seq !== state.searchSeq) {
        return state;
      }
      return { ...state, phase: "error", error: event.message };
  }
}

/** The submit button mirrors make_query's empty-query rejection. */
export function canSubmit(state: QueryState): boolean {
  return state.domainId !== null && state.checked.length > 0;
}

/** Request body for the current selection; throws if submit is disabled. */
export function toSearchRequest(state: QueryState): SearchRequest {
  if (!canSubmit(state) || state.domainId === null) {
    throw new Error("cannot build a search request with no concepts checked");
  }
  const body: SearchRequest = {
    domain_id: state.domainId,
    concepts: [...state.checked],
  };
  if (state.pob !== null) {
    body.pob = state.pob;
  }
  if (state.expand.length > 0) {
    body.expand = [...state.expand];
  }
  if (state.top !== null) {
    body.top = state.top;
  }
  return body;
}
