/** Pure HTML renderers; the app shell only swaps innerHTML and wires clicks. */

import type { ContextSentence, OracleQuery, RunState } from "./api.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Sentence text with every entity span wrapped in a role-tagged <mark>. */
export function highlightContext(sentence: ContextSentence): string {
  const spans = [...sentence.spans].sort((a, b) => a.start - b.start);
  let html = "";
  let cursor = 0;
  for (const span of spans) {
    if (span.start < cursor) {
      continue; // overlapping spans never happen; skip defensively
    }
    html += escapeHtml(sentence.text.slice(cursor, span.start));
    html += `<mark class="hl hl-${escapeHtml(span.role)}">`;
    html += escapeHtml(sentence.text.slice(span.start, span.end));
    html += "</mark>";
    cursor = span.end;
  }
  html += escapeHtml(sentence.text.slice(cursor));
  return html;
}

function candidateHtml(query: OracleQuery): string {
  const p = query.payload;
  if (query.kind === "conflict") {
    return (
      `<div class="conflict">` +
      `<span class="conflict-option">${escapeHtml(String(p.relation_a ?? ""))}</span>` +
      `<span class="conflict-vs">vs</span>` +
      `<span class="conflict-option">${escapeHtml(String(p.relation_b ?? ""))}</span>` +
      `</div>` +
      `<p class="description">${escapeHtml(String(p.description ?? ""))}</p>`
    );
  }
  if (query.kind === "relation" && p.subject && p.object) {
    return (
      `<p class="triple">(<strong>${escapeHtml(String(p.subject))}</strong>, ` +
      `${escapeHtml(query.relation_name)}, ` +
      `<strong>${escapeHtml(String(p.object))}</strong>)</p>`
    );
  }
  return `<p class="description">${escapeHtml(String(p.description ?? p.key ?? ""))}</p>`;
}

export function renderQuery(query: OracleQuery): string {
  const contexts = query.context
    .map((c) => `<p class="context">${highlightContext(c)}</p>`)
    .join("");
  const buttons = (["yes", "no", "dont_know"] as const)
    .map(
      (answer) =>
        `<button class="answer answer-${answer}" data-id="${escapeHtml(query.id)}"` +
        ` data-answer="${answer}">${answer.replace("_", "'")}</button>`,
    )
    .join("");
  return (
    `<article class="card" data-query="${escapeHtml(query.id)}">` +
    `<header><span class="kind kind-${query.kind}">${query.kind}</span>` +
    `<span class="relation">${escapeHtml(query.relation_name)}</span>` +
    `<span class="iteration">cycle ${query.iteration}</span></header>` +
    candidateHtml(query) +
    contexts +
    `<footer>${buttons}</footer>` +
    `</article>`
  );
}

export function renderQueue(queries: OracleQuery[]): string {
  if (queries.length === 0) {
    return `<p class="empty">No pending queries — the engine is running or done.</p>`;
  }
  return queries.map(renderQuery).join("");
}

export function renderState(state: RunState): string {
  const names = Object.keys(state.relations).sort();
  if (names.length === 0) {
    return `<p class="empty">No cycles reported yet.</p>`;
  }
  const rows = names
    .map((name) => {
      const r = state.relations[name];
      const accepted =
        r.last_cycle.patterns.filter((x) => x.accepted).length +
        r.last_cycle.relations.filter((x) => x.accepted).length;
      return (
        `<tr><td>${escapeHtml(name)}</td><td>${r.iteration}</td>` +
        `<td>${r.seed_set_sizes.relations}</td><td>${r.seed_set_sizes.patterns}</td>` +
        `<td>${accepted}</td></tr>`
      );
    })
    .join("");
  return (
    `<table class="progress"><thead><tr>` +
    `<th>relation</th><th>cycle</th><th>relations</th><th>patterns</th>` +
    `<th>accepted last cycle</th></tr></thead><tbody>${rows}</tbody></table>`
  );
}

export function renderError(message: string): string {
  return `<div class="banner error">Service unreachable: ${escapeHtml(message)} — retrying…</div>`;
}
