/** Score tables with best/worst markers and clipboard export. */

import { GroupScores, api } from "./api";
import { append, el } from "./dom";

export function renderGroupScores(container: HTMLElement,
                                  payload: GroupScores): void {
  const withGroups = payload.rows.some((row) => row.group !== "ALL");
  const table = el("table", { class: "score-table" });
  const head = el("tr", {});
  if (withGroups) append(head, el("th", {}, "group"));
  append(head, el("th", {}, "metric"));
  for (const model of payload.models) {
    append(head, el("th", {}, model));
  }
  append(table, el("thead", {}, head));
  const body = el("tbody", {});
  for (const row of payload.rows) {
    const tr = el("tr", { "data-group": row.group, "data-metric": row.metric });
    if (withGroups) append(tr, el("td", { class: "group" }, row.group));
    append(tr, el("td", { class: "metric" }, row.metric));
    for (const cell of row.cells) {
      let value: HTMLElement = el("span", {
        class: "score-value",
        "data-score": String(cell.score),
      }, cell.score.toFixed(3));
      if (cell.best) value = el("strong", {}, value);
      if (cell.worst) value = el("em", { class: "worst" }, value);
      append(tr, el("td", { "data-model": cell.model }, value));
    }
    append(body, tr);
  }
  append(table, body);
  append(container, table);
  for (const note of payload.notes) {
    append(container, el("p", { class: "note" }, note));
  }
}

/**
 * Copy an export table to the clipboard. The clipboard receives the API
 * export body byte-for-byte; the UI adds nothing.
 */
export async function copyTable(task: string, set: string,
                                format: "csv" | "latex",
                                metrics?: string[]): Promise<string> {
  const body = await api.exportBody(task, set, "scores", format, metrics);
  await navigator.clipboard.writeText(body);
  return body;
}

export function renderCopyControls(container: HTMLElement, task: string,
                                   set: string, metrics?: string[]): void {
  const status = el("span", { class: "copy-status" });
  const copy = (format: "csv" | "latex") => () => {
    copyTable(task, set, format, metrics).then(
      () => { status.textContent = `${format} copied`; },
      (error: Error) => { status.textContent = `copy failed: ${error.message}`; });
  };
  append(container, el("div", { class: "copy-controls" },
    el("button", { class: "copy-csv", onclick: copy("csv") }, "copy CSV"),
    " ",
    el("button", { class: "copy-latex", onclick: copy("latex") }, "copy LaTeX"),
    " ", status));
}
