import { describe, expect, it } from "vitest";

import type { SearchResult, TreeNode } from "../src/api.js";
import {
  escapeHtml,
  formatTime,
  renderDomainOptions,
  renderErrorBanner,
  renderResults,
  renderTree,
} from "../src/views.js";

const none: ReadonlySet<string> = new Set();

function node(id: string, label: string, children: TreeNode[] = []): TreeNode {
  return { id, label, children };
}

const FOREST = [
  node("instruction", "Instruction", [
    node("affectation", "Affectation"),
    node("instruction_de_controle", "Instruction de contrôle"),
  ]),
  node("pointeur", "Pointeur"),
];

describe("renderTree", () => {
  it("renders the hierarchy with per-concept checkboxes", () => {
    const html = renderTree(FOREST, none, none);
    expect(html).toContain('data-concept="instruction"');
    expect(html).toContain('data-concept="affectation"');
    expect(html).toContain('data-concept="pointeur"');
    // child list nested inside the parent's <li>
    const parent = html.indexOf('data-concept="instruction"');
    const child = html.indexOf('data-concept="affectation"');
    const parentClose = html.indexOf("</li>", parent);
    expect(child).toBeGreaterThan(parent);
    expect(child).toBeLessThan(parentClose);
  });

  it("marks checked concepts and only those", () => {
    const html = renderTree(FOREST, new Set(["affectation"]), none);
    expect(html).toMatch(/data-concept="affectation" checked/);
    expect(html).not.toMatch(/data-concept="pointeur" checked/);
  });

  it("a collapsed branch hides its children but keeps its checkbox", () => {
    const html = renderTree(FOREST, none, new Set(["instruction"]));
    expect(html).toContain('data-concept="instruction"');
    expect(html).not.toContain('data-concept="affectation"');
    expect(html).toMatch(/data-branch="instruction" aria-expanded="false"/);
  });

  it("leaves have no fold button", () => {
    const html = renderTree(FOREST, none, none);
    expect(html).not.toContain('data-branch="pointeur"');
  });

  it("empty forest shows the placeholder", () => {
    expect(renderTree([], none, none)).toContain("no concepts");
  });

  it("escapes hostile labels", () => {
    const html = renderTree(
      [node("x", '<script>alert("x")</script>')],
      none,
      none,
    );
    expect(html).not.toContain("<script>");
    expect(html).toContain("&lt;script&gt;");
  });
});

function result(over: Partial<SearchResult> = {}): SearchResult {
  return {
    lesson_id: "D8",
    segment_id: "S9",
    score: 1.0,
    lesson_title: "Pointeurs avances",
    segment_title: "partie 9",
    begin: 1600,
    duration: 180,
    url: "http://example.test/d8.mp4",
    pobs: [
      { pob_id: "definition_9_0", kind: "definition", concepts: ["Pointeur"] },
      {
        pob_id: "exemple_9_1",
        kind: "example",
        concepts: ["Pointeur"],
        comment: "exemple au tableau",
      },
    ],
    ...over,
  };
}

describe("renderResults", () => {
  it("keeps the given order — scores are display-only", () => {
    const html = renderResults([
      result({ lesson_id: "D2", segment_id: "S1", score: 0.3 }),
      result({ lesson_id: "D9", segment_id: "S5", score: 0.9 }),
    ]);
    const first = html.indexOf('data-lesson="D2"');
    const second = html.indexOf('data-lesson="D9"');
    expect(first).toBeGreaterThanOrEqual(0);
    expect(second).toBeGreaterThan(first);
    expect(html.indexOf("1.")).toBeLessThan(html.indexOf("2."));
  });

  it("shows scores to four decimals", () => {
    const html = renderResults([result({ score: 0.977752 })]);
    expect(html).toContain("0.9778");
    expect(html).not.toContain("0.977752");
  });

  it("shows begin/duration as timecodes and links the lesson video", () => {
    const html = renderResults([result()]);
    expect(html).toContain("00:26:40");
    expect(html).toContain("00:03:00");
    expect(html).toContain('href="http://example.test/d8.mp4"');
    expect(html).toContain('rel="noopener"');
  });

  it("renders one chip per pedagogical object, comments included", () => {
    const html = renderResults([result()]);
    expect(html).toContain("definition");
    expect(html).toContain("example");
    expect(html).toContain("exemple au tableau");
  });

  it("empty result list suggests toggling expansion", () => {
    const html = renderResults([]);
    expect(html).toContain("no segments matched");
    expect(html).toMatch(/expansion/);
  });

  it("escapes titles, urls and comments", () => {
    const html = renderResults([
      result({
        segment_title: 'a<b>"c',
        url: 'http://x/"><script>',
        pobs: [
          {
            pob_id: "p",
            kind: "rule",
            concepts: ["<img>"],
            comment: "<svg onload=x>",
          },
        ],
      }),
    ]);
    expect(html).not.toContain("<script>");
    expect(html).not.toContain("<svg");
    expect(html).not.toContain("<img>");
  });
});

describe("banners and chrome", () => {
  it("error banner carries the message, escaped", () => {
    const html = renderErrorBanner("no domain '<x>' is loaded");
    expect(html).toContain("banner error");
    expect(html).toContain("&lt;x&gt;");
    expect(html).not.toContain("data-retry");
  });

  it("retryable banner exposes the retry button", () => {
    expect(renderErrorBanner("tree fetch failed", true)).toContain(
      "data-retry",
    );
  });

  it("domain options include the placeholder and mark the selection", () => {
    const html = renderDomainOptions(
      [
        { domain_id: "a", label: "Domain A", concept_count: 3 },
        { domain_id: "b", label: "Domain B", concept_count: 9 },
      ],
      "b",
    );
    expect(html).toContain("choose a domain");
    expect(html).toMatch(/value="b" selected/);
    expect(html).not.toMatch(/value="a" selected/);
    expect(html).toContain("Domain B (9)");
  });
});

describe("formatTime", () => {
  it.each([
    [0, "00:00:00"],
    [59, "00:00:59"],
    [121, "00:02:01"],
    [1600, "00:26:40"],
    [3600, "01:00:00"],
    [360001, "100:00:01"],
  ])("%d s -> %s", (seconds, expected) => {
    expect(formatTime(seconds)).toBe(expected);
  });
});

describe("escapeHtml", () => {
  it("handles all five specials", () => {
    expect(escapeHtml(`<a href="x" title='y'>&</a>`)).toBe(
      "&lt;a href=&quot;x&quot; title=&#39;y&#39;&gt;&amp;&lt;/a&gt;",
    );
  });
});
