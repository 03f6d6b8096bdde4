/**
 * DOM wiring: owns the state, talks to the API, re-renders on every
 * dispatch.  All logic that can live outside the browser is in state.ts
 * and views.ts; this file is the thin imperative shell around them.
 */

import { ApiClient, ApiError, type TreePayload } from "./api.js";
import {
  canSubmit,
  initialState,
  reduce,
  toSearchRequest,
  type QueryState,
  type UiEvent,
} from "./state.js";
import {
  renderDomainOptions,
  renderErrorBanner,
  renderLoading,
  renderResults,
  renderTree,
} from "./views.js";

const api = new ApiClient();

let state: QueryState = initialState;
let tree: TreePayload | null = null;
let inFlight: AbortController | null = null;

function el<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id);
  if (!found) {
    throw new Error(`missing element #${id}`);
  }
  return found as T;
}

const domainSelect = el<HTMLSelectElement>("domain");
const treeBox = el<HTMLElement>("tree");
const pobSelect = el<HTMLSelectElement>("pob");
const topInput = el<HTMLInputElement>("top");
const expandBox = el<HTMLElement>("expand");
const submitButton = el<HTMLButtonElement>("submit");
const resultsBox = el<HTMLElement>("results");
const statusBox = el<HTMLElement>("status");

function dispatch(event: UiEvent): void {
  state = reduce(state, event);
  render();
}

function render(): void {
  submitButton.disabled = !canSubmit(state);

  if (state.treeError !== null) {
    treeBox.innerHTML = renderErrorBanner(state.treeError, true);
  } else if (state.domainId === null) {
    treeBox.innerHTML = '<p class="placeholder">choose a domain above</p>';
  } else if (tree === null) {
    treeBox.innerHTML = '<p class="placeholder">loading tree…</p>';
  } else {
    treeBox.innerHTML = renderTree(
      tree.roots,
      new Set(state.checked),
      new Set(state.collapsed),
    );
  }

  statusBox.innerHTML =
    state.phase === "error" && state.error !== null
      ? renderErrorBanner(state.error)
      : "";
  if (state.phase === "loading") {
    resultsBox.innerHTML = renderLoading();
  } else if (state.phase === "results") {
    resultsBox.innerHTML = renderResults(state.results);
  } else if (state.phase === "idle") {
    resultsBox.innerHTML = "";
  } else {
    // "error": keep the last good results under the banner, if any
    resultsBox.innerHTML =
      state.results.length > 0 ? renderResults(state.results) : "";
  }
}

async function loadTree(domainId: string): Promise<void> {
  tree = null;
  try {
    const payload = await api.domainTree(domainId);
    if (state.domainId !== domainId) {
      return; // user switched domains while this was loading
    }
    tree = payload;
    dispatch({ type: "tree-loaded" });
  } catch (err) {
    if (state.domainId === domainId) {
      dispatch({ type: "tree-failed", message: describe(err) });
    }
  }
}

function describe(err: unknown): string {
  if (err instanceof ApiError) {
    return err.message;
  }
  if (err instanceof Error) {
    return `request failed: ${err.message}`;
  }
  return "request failed";
}

async function runSearch(): Promise<void> {
  if (!canSubmit(state)) {
    return;
  }
  const body = toSearchRequest(state);
  inFlight?.abort(); // at most one live search; newest wins
  const controller = new AbortController();
  inFlight = controller;
  dispatch({ type: "search-started" });
  const seq = state.searchSeq;
  try {
    const { results } = await api.search(body, controller.signal);
    dispatch({ type: "search-succeeded", seq, results });
  } catch (err) {
    if (controller.signal.aborted) {
      return; // superseded; the newer request owns the UI now
    }
    dispatch({ type: "search-failed", seq, message: describe(err) });
  } finally {
    if (inFlight === controller) {
      inFlight = null;
    }
  }
}

function wireEvents(): void {
  domainSelect.addEventListener("change", () => {
    const domainId = domainSelect.value || null;
    dispatch({ type: "domain-selected", domainId });
    if (domainId !== null) {
      void loadTree(domainId);
    } else {
      tree = null;
      render();
    }
  });

  treeBox.addEventListener("change", (event) => {
    const target = event.target as HTMLElement;
    const conceptId = target.getAttribute("data-concept");
    if (conceptId !== null) {
      dispatch({ type: "concept-toggled", conceptId });
    }
  });

  treeBox.addEventListener("click", (event) => {
    const target = (event.target as HTMLElement).closest(
      "[data-branch],[data-retry]",
    );
    if (!target) {
      return;
    }
    const branch = target.getAttribute("data-branch");
    if (branch !== null) {
      dispatch({ type: "branch-toggled", conceptId: branch });
    } else if (state.domainId !== null) {
      dispatch({ type: "tree-loaded" }); // clear the banner
      void loadTree(state.domainId);
    }
  });

  pobSelect.addEventListener("change", () => {
    dispatch({ type: "pob-set", pob: pobSelect.value || null });
  });

  topInput.addEventListener("change", () => {
    const n = Number.parseInt(topInput.value, 10);
    dispatch({ type: "top-set", top: Number.isFinite(n) && n >= 1 ? n : null });
  });

  expandBox.addEventListener("change", (event) => {
    const kind = (event.target as HTMLElement).getAttribute("data-expand");
    if (kind !== null) {
      dispatch({ type: "expand-toggled", kind });
    }
  });

  el<HTMLFormElement>("query-form").addEventListener("submit", (event) => {
    event.preventDefault();
    void runSearch();
  });
}

async function boot(): Promise<void> {
  wireEvents();
  render();
  try {
    const domains = await api.listDomains();
    domainSelect.innerHTML = renderDomainOptions(domains, state.domainId);
    if (domains.length === 1 && domains[0]) {
      // exactly one domain loaded: pre-select it
      domainSelect.value = domains[0].domain_id;
      dispatch({ type: "domain-selected", domainId: domains[0].domain_id });
      void loadTree(domains[0].domain_id);
    }
  } catch (err) {
    statusBox.innerHTML = renderErrorBanner(describe(err));
  }
}

void boot();
