/**
 * Pure renderers: state in, HTML string out.  The app layer swaps the
 * strings into the page; tests assert on them directly.
 */

import type { DomainInfo, SearchResult, TreeNode } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

/** Seconds → hh:mm:ss, hours unbounded (mirrors the data format). */
export function formatTime(totalSeconds: number): string {
  const hours = Math.floor(totalSeconds / 3600);
  const minutes = Math.floor((totalSeconds % 3600) / 60);
  const seconds = totalSeconds % 60;
  const pad = (n: number) => String(n).padStart(2, "0");
  return `${pad(hours)}:${pad(minutes)}:${pad(seconds)}`;
}

export function renderDomainOptions(
  domains: readonly DomainInfo[],
  selected: string | null,
): string {
  const options = domains.map(
    (d) =>
      `<option value="${escapeHtml(d.domain_id)}"` +
      `${d.domain_id === selected ? " selected" : ""}>` +
      `${escapeHtml(d.label)} (${d.concept_count})</option>`,
  );
  return `<option value="">— choose a domain —</option>${options.join("")}`;
}

function renderNode(
  node: TreeNode,
  checked: ReadonlySet<string>,
  collapsed: ReadonlySet<string>,
): string {
  const id = escapeHtml(node.id);
  const isCollapsed = collapsed.has(node.id);
  const parts: string[] = ["<li>"];
  if (node.children.length > 0) {
    parts.push(
      `<button class="twist" data-branch="${id}" ` +
        `aria-expanded="${!isCollapsed}">${isCollapsed ? "▸" : "▾"}</button>`,
    );
  } else {
    parts.push('<span class="twist-spacer"></span>');
  }
  parts.push(
    `<label><input type="checkbox" data-concept="${id}"` +
      `${checked.has(node.id) ? " checked" : ""}> ` +
      `${escapeHtml(node.label)}</label>`,
  );
  if (node.children.length > 0 && !isCollapsed) {
    parts.push(renderForest(node.children, checked, collapsed));
  }
  parts.push("</li>");
  return parts.join("");
}

function renderForest(
  nodes: readonly TreeNode[],
  checked: ReadonlySet<string>,
  collapsed: ReadonlySet<string>,
): string {
  return `<ul class="tree">${nodes
    .map((n) => renderNode(n, checked, collapsed))
    .join("")}</ul>`;
}

export function renderTree(
  roots: readonly TreeNode[],
  checked: ReadonlySet<string>,
  collapsed: ReadonlySet<string>,
): string {
  if (roots.length === 0) {
    return '<p class="placeholder">no concepts in this domain</p>';
  }
  return renderForest(roots, checked, collapsed);
}

function renderPobChips(result: SearchResult): string {
  return result.pobs
    .map((pob) => {
      const comment = pob.comment
        ? ` — <span class="comment">${escapeHtml(pob.comment)}</span>`
        : "";
      return (
        `<li class="chip"><span class="kind">${escapeHtml(pob.kind)}</span> ` +
        `${escapeHtml(pob.concepts.join(", "))}${comment}</li>`
      );
    })
    .join("");
}

function renderResultCard(result: SearchResult, rank: number): string {
  return (
    `<article class="result" data-lesson="${escapeHtml(result.lesson_id)}" ` +
    `data-segment="${escapeHtml(result.segment_id)}">` +
    `<header>` +
    `<span class="rank">${rank}.</span> ` +
    `<span class="score">${result.score.toFixed(4)}</span> ` +
    `<strong>${escapeHtml(result.lesson_title)}</strong> — ` +
    `${escapeHtml(result.segment_title)}` +
    `</header>` +
    `<p class="when">${formatTime(result.begin)} + ` +
    `${formatTime(result.duration)} · ` +
    `<a href="${escapeHtml(result.url)}" target="_blank" rel="noopener">open video</a></p>` +
    `<ul class="pobs">${renderPobChips(result)}</ul>` +
    `</article>`
  );
}

export function renderResults(results: readonly SearchResult[]): string {
  if (results.length === 0) {
    return (
      '<p class="placeholder">no segments matched — try toggling query ' +
      "expansion or removing the POB filter</p>"
    );
  }
  // Rendered strictly in the order the API returned them.
  return results.map((r, i) => renderResultCard(r, i + 1)).join("");
}

export function renderErrorBanner(message: string, retryable = false): string {
  const retry = retryable
    ? ' <button class="retry" data-retry="1">retry</button>'
    : "";
  return `<div class="banner error" role="alert">${escapeHtml(message)}${retry}</div>`;
}

export function renderLoading(): string {
  return '<p class="placeholder">searching…</p>';
}
