/** Example browser: sources, references, highlighted predictions, scores. */

import { ExampleItem, ExamplePage, ModelEntry, SourceEntry } from "./api";
import { append, el } from "./dom";

export interface ExampleHandlers {
  onPage(page: number): void;
  onKeyword(keyword: string): void;
  onPageSize(size: number): void;
}

export const TRANSLATE_BASE = "https://translate.google.com/?sl=auto&tl=en&text=";

export function translateLink(text: string): string {
  return TRANSLATE_BASE + encodeURIComponent(text);
}

function renderSource(source: SourceEntry): HTMLElement {
  const row = el("div", { class: "source", "data-stream": source.name });
  if (source.modality === "text") {
    append(row,
      el("span", { class: "source-text" }, source.text ?? ""),
      el("a", {
        class: "translate-link",
        href: translateLink(source.text ?? ""),
        target: "_blank",
        rel: "noopener",
      }, "translate"));
  } else if (source.modality === "image") {
    append(row, el("img", { src: source.url ?? "", class: "source-media", alt: source.name }));
  } else if (source.modality === "audio") {
    append(row, el("audio", { src: source.url ?? "", controls: true, class: "source-media" }));
  } else {
    append(row, el("video", { src: source.url ?? "", controls: true, class: "source-media" }));
  }
  return row;
}

function renderPrediction(entry: ModelEntry): HTMLElement {
  const container = el("div", { class: "prediction" });
  if (entry.highlights.length === 0) {
    append(container, el("span", { class: "tokens unmatched" }, entry.prediction));
    return container;
  }
  for (const span of entry.highlights) {
    const text = entry.tokens.slice(span.start, span.end).join(" ");
    append(container,
      el("span", {
        class: span.matched ? "tokens matched" : "tokens unmatched",
        "data-start": span.start,
        "data-end": span.end,
      }, text),
      " ");
  }
  return container;
}

function renderScores(entry: ModelEntry): HTMLElement {
  const list = el("span", { class: "scores" });
  for (const score of entry.scores) {
    let value: HTMLElement = el("span", {
      class: "score-value",
      "data-metric": score.metric,
      "data-score": String(score.score),
    }, score.score.toFixed(2));
    if (score.best) value = el("strong", {}, value);
    if (score.worst) value = el("em", { class: "worst" }, value);
    append(list, el("span", { class: "score" }, `${score.metric} `, value), " ");
  }
  return list;
}

function renderItem(item: ExampleItem): HTMLElement {
  const card = el("article", { class: "example", "data-index": item.index });
  const tags = el("span", { class: "tags" });
  for (const tag of item.tags) {
    append(tags, el("span", { class: `tag tag-${tag.origin}` }, tag.name), " ");
  }
  append(card, el("header", {},
    el("span", { class: "example-index" }, String(item.index)), " ", tags));
  for (const source of item.sources) {
    append(card, renderSource(source));
  }
  const refs = el("ul", { class: "references" });
  for (const ref of item.references) {
    append(refs, el("li", { "data-stream": ref.name },
      ref.text === null
        ? el("span", { class: "absent" }, "(no reference)")
        : ref.text));
  }
  append(card, refs);
  for (const entry of item.models) {
    append(card, el("div", { class: "model-row", "data-model": entry.model },
      el("span", { class: "model-name" }, entry.model),
      renderPrediction(entry),
      renderScores(entry)));
  }
  return card;
}

export function renderExamplePage(
  container: HTMLElement,
  page: ExamplePage,
  handlers: ExampleHandlers,
): void {
  const pages = Math.max(1, Math.ceil(page.total / page.page_size));
  const pager = el("nav", { class: "pager" },
    el("button", {
      class: "prev", disabled: page.page <= 1,
      onclick: () => handlers.onPage(page.page - 1),
    }, "previous"),
    el("span", { class: "page-info" },
      `page ${page.page} / ${pages} — `,
      el("span", { class: "total", "data-total": String(page.total) },
        String(page.total)),
      " examples"),
    el("button", {
      class: "next", disabled: page.page >= pages,
      onclick: () => handlers.onPage(page.page + 1),
    }, "next"));
  append(container, pager);
  for (const item of page.items) {
    append(container, renderItem(item));
  }
}
