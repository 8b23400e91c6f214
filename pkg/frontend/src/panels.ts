/** Analysis tab renderers: dataset stats, n-gram tables, tag distribution. */

import { DatasetStats, NGramTable, ScoreDist, TagCount } from "./api";
import { barChart, chartWithControls, histogramChart } from "./charts";
import { append, el } from "./dom";

export function renderStats(container: HTMLElement, stats: DatasetStats): void {
  const table = el("table", { class: "stats-table" },
    el("thead", {}, el("tr", {},
      el("th", {}, "stream"), el("th", {}, "kind"),
      el("th", {}, "sentences"), el("th", {}, "tokens"), el("th", {}, "chars"))));
  const body = el("tbody", {});
  for (const stream of stats.streams) {
    append(body, el("tr", { "data-stream": stream.stream },
      el("td", {}, stream.stream),
      el("td", {}, stream.kind),
      el("td", { class: "count", "data-count": String(stream.sentence_count) },
        String(stream.sentence_count)),
      el("td", { class: "count", "data-count": String(stream.token_count) },
        String(stream.token_count)),
      el("td", { class: "count", "data-count": String(stream.char_count) },
        String(stream.char_count))));
  }
  append(table, body);
  append(container, table);
  for (const stream of stats.streams) {
    if (stream.length_histogram.counts.length) {
      append(container,
        el("h3", {}, `${stream.stream} length distribution`),
        chartWithControls(histogramChart(stream.length_histogram, stream.stream),
                          `${stream.stream}-lengths`));
    }
    if (stream.token_frequency.length) {
      const top = stream.token_frequency.slice(0, 30);
      append(container,
        el("h3", {}, `${stream.stream} token frequency (top ${top.length})`),
        chartWithControls(
          barChart(top.map(([token, count]) => ({ label: token, value: count })),
                   `${stream.stream} tokens`),
          `${stream.stream}-tokens`));
    }
  }
}

export function renderNgrams(container: HTMLElement, table: NGramTable,
                             onSelect: (ngram: string) => void): void {
  for (const order of Object.keys(table).sort()) {
    const entries = table[order];
    append(container, el("h3", {}, `${order}-grams`));
    const list = el("table", { class: "ngram-table", "data-order": order },
      el("thead", {}, el("tr", {},
        el("th", {}, "n-gram"), el("th", {}, "count"), el("th", {}, "examples"))));
    const body = el("tbody", {});
    for (const entry of entries) {
      append(body, el("tr", {},
        el("td", {},
          el("a", {
            class: "ngram-link",
            href: "#",
            "data-ngram": entry.ngram,
            onclick: (event: Event) => {
              event.preventDefault();
              onSelect(entry.ngram);
            },
          }, entry.ngram)),
        el("td", { class: "count", "data-count": String(entry.count) },
          String(entry.count)),
        el("td", { class: "example-refs" }, entry.examples.slice(0, 12).join(", ") +
          (entry.examples.length > 12 ? ", …" : ""))));
    }
    append(list, body);
    append(container, list);
  }
}

export function renderTagDistribution(container: HTMLElement,
                                      tags: TagCount[]): void {
  if (!tags.length) {
    append(container, el("p", { class: "note" }, "no tags in this eval set"));
    return;
  }
  append(container, chartWithControls(
    barChart(tags.map((t) => ({ label: t.name, value: t.count })), "tags"),
    "tag-distribution"));
  const table = el("table", { class: "tag-table" },
    el("thead", {}, el("tr", {}, el("th", {}, "tag"), el("th", {}, "examples"))));
  const body = el("tbody", {});
  for (const tag of tags) {
    append(body, el("tr", {},
      el("td", {}, tag.name),
      el("td", { class: "count", "data-count": String(tag.count) },
        String(tag.count))));
  }
  append(table, body);
  append(container, table);
}

export function renderScoreDistributions(container: HTMLElement,
                                         dist: ScoreDist): void {
  for (const [model, histogram] of Object.entries(dist.models)) {
    append(container,
      el("h3", {}, `${dist.metric} — ${model}`),
      chartWithControls(histogramChart(histogram, `${dist.metric} ${model}`),
                        `${dist.metric}-${model}`));
  }
}
