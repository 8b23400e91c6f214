/** Application shell: task/set/model selection, tabs, URL-driven state. */

import { api } from "./api";
import { append, clear, el } from "./dom";
import { ExampleHandlers, renderExamplePage } from "./examples";
import {
  renderNgrams,
  renderScoreDistributions,
  renderStats,
  renderTagDistribution,
} from "./panels";
import {
  PAGE_SIZES,
  TABS,
  Tab,
  ViewState,
  examplesRequestPath,
  parseViewState,
  scoresRequestQuery,
  serializeViewState,
} from "./state";
import { renderCopyControls, renderGroupScores } from "./tables";
import { renderUpload } from "./upload";

export class App {
  state: ViewState;
  private root: HTMLElement;
  private controller: AbortController | null = null;

  constructor(root: HTMLElement) {
    this.root = root;
    this.state = parseViewState(window.location.search);
    window.addEventListener("popstate", () => {
      this.state = parseViewState(window.location.search);
      void this.render();
    });
  }

  /** Update state, reflect it in the URL, re-render. */
  update(patch: Partial<ViewState>, resetPage = false): void {
    this.state = { ...this.state, ...patch };
    if (resetPage) this.state.page = 1;
    const query = serializeViewState(this.state);
    window.history.pushState(null, "", query || window.location.pathname);
    void this.render();
  }

  private freshSignal(): AbortSignal {
    if (this.controller) this.controller.abort();
    this.controller = new AbortController();
    return this.controller.signal;
  }

  async render(): Promise<void> {
    const signal = this.freshSignal();
    clear(this.root);
    const header = el("header", { class: "topbar" },
      el("h1", {}, "seqeval"));
    const pickers = el("div", { class: "pickers" });
    const tabs = el("nav", { class: "tabs" });
    const main = el("main", { id: "panel" });
    append(this.root, header, pickers, tabs, main);

    try {
      await this.renderPickers(pickers, signal);
      if (!this.state.task || !this.state.set) {
        append(main, el("p", { class: "hint" },
          "select a task and eval set to start, or upload a new one below"));
        renderUpload(main, {
          onInstalled: (task, set) =>
            this.update({ task, set, tab: "examples", models: [] }, true),
        });
        return;
      }
      this.renderTabs(tabs);
      await this.renderPanel(main, signal);
    } catch (error) {
      if ((error as Error).name === "AbortError") return;
      append(main, el("div", { class: "error-banner" },
        `request failed: ${(error as Error).message}`));
    }
  }

  private async renderPickers(container: HTMLElement,
                              signal: AbortSignal): Promise<void> {
    const { tasks } = await api.tasks(signal);
    const taskSelect = el("select", {
      class: "task-select",
      onchange: (event: Event) => this.update({
        task: (event.target as HTMLSelectElement).value,
        set: "", models: [],
      }, true),
    }) as HTMLSelectElement;
    append(taskSelect, el("option", { value: "" }, "task…"));
    for (const task of tasks) {
      const option = el("option", { value: task }, task);
      if (task === this.state.task) option.setAttribute("selected", "");
      append(taskSelect, option);
    }
    append(container, taskSelect);

    if (!this.state.task) return;
    const { sets } = await api.sets(this.state.task, signal);
    const setSelect = el("select", {
      class: "set-select",
      onchange: (event: Event) => this.update({
        set: (event.target as HTMLSelectElement).value, models: [],
      }, true),
    }) as HTMLSelectElement;
    append(setSelect, el("option", { value: "" }, "eval set…"));
    for (const entry of sets) {
      const label = entry.valid
        ? `${entry.name} (${entry.example_count})`
        : `${entry.name} (invalid)`;
      const option = el("option", { value: entry.name }, label);
      if (entry.name === this.state.set) option.setAttribute("selected", "");
      if (!entry.valid) option.setAttribute("disabled", "");
      append(setSelect, option);
    }
    append(container, setSelect);

    if (!this.state.set) return;
    const { models } = await api.models(this.state.task, this.state.set, signal);
    const picker = el("span", { class: "model-picker" });
    for (const model of models) {
      const selected = this.state.models.length === 0 ||
        this.state.models.includes(model);
      const box = el("input", {
        type: "checkbox", value: model,
        onchange: () => {
          const chosen = Array.from(
            picker.querySelectorAll<HTMLInputElement>("input:checked"),
          ).map((node) => node.value);
          this.update({ models: chosen.length === models.length ? [] : chosen }, true);
        },
      }) as HTMLInputElement;
      if (selected) box.setAttribute("checked", "");
      append(picker, el("label", { class: "model-option" }, box, model));
    }
    append(container, picker);
  }

  private renderTabs(container: HTMLElement): void {
    for (const tab of TABS) {
      append(container, el("button", {
        class: tab === this.state.tab ? "tab active" : "tab",
        "data-tab": tab,
        onclick: () => this.update({ tab: tab as Tab }),
      }, tab));
    }
    append(container, el("button", {
      class: this.state.tab === ("upload" as Tab) ? "tab active" : "tab",
      "data-tab": "upload",
      onclick: () => this.update({ tab: "upload" as Tab }),
    }, "upload"));
  }

  private async renderPanel(main: HTMLElement, signal: AbortSignal): Promise<void> {
    const { task, set } = this.state;
    switch (this.state.tab as string) {
      case "examples": {
        this.renderExampleControls(main);
        const page = await api.examples(examplesRequestPath(this.state), signal);
        const handlers: ExampleHandlers = {
          onPage: (page) => this.update({ page }),
          onKeyword: (keyword) => this.update({ keyword }, true),
          onPageSize: (pageSize) => this.update({ pageSize }, true),
        };
        renderExamplePage(main, page, handlers);
        break;
      }
      case "stats": {
        renderStats(main, await api.stats(task, set, signal));
        break;
      }
      case "ngrams": {
        renderNgrams(main, await api.ngrams(task, set, 20, signal),
          (ngram) => this.update({ tab: "examples", keyword: ngram }, true));
        break;
      }
      case "scores": {
        renderCopyControls(main, task, set,
          this.state.metrics.length ? this.state.metrics : undefined);
        const payload = await api.scores(
          task, set, scoresRequestQuery(this.state, true), signal);
        renderGroupScores(main, payload);
        if (payload.metrics.length) {
          renderScoreDistributions(
            main, await api.scoreDist(task, set, payload.metrics[0], signal));
        }
        break;
      }
      case "tags": {
        const { tags } = await api.tags(task, set, signal);
        renderTagDistribution(main, tags);
        break;
      }
      case "upload": {
        renderUpload(main, {
          onInstalled: (task, set) =>
            this.update({ task, set, tab: "examples", models: [] }, true),
        });
        break;
      }
    }
  }

  private renderExampleControls(main: HTMLElement): void {
    const keyword = el("input", {
      type: "search",
      class: "keyword",
      placeholder: "keyword or n-gram filter",
      value: this.state.keyword,
    }) as HTMLInputElement;
    keyword.addEventListener("change", () =>
      this.update({ keyword: keyword.value }, true));
    const sizeSelect = el("select", {
      class: "page-size",
      onchange: (event: Event) => this.update({
        pageSize: Number((event.target as HTMLSelectElement).value),
      }, true),
    }) as HTMLSelectElement;
    for (const size of PAGE_SIZES) {
      const option = el("option", { value: size }, String(size));
      if (size === this.state.pageSize) option.setAttribute("selected", "");
      append(sizeSelect, option);
    }
    const sortOrder = el("button", {
      class: "sort-order",
      onclick: () => this.update({
        sortOrder: this.state.sortOrder === "asc" ? "desc" : "asc",
      }, true),
    }, this.state.sortOrder);
    const sortBy = el("input", {
      type: "text",
      class: "sort-by",
      value: this.state.sortBy,
      title: "index, source_length, or a metric id",
    }) as HTMLInputElement;
    sortBy.addEventListener("change", () =>
      this.update({ sortBy: sortBy.value || "index" }, true));
    append(main, el("div", { class: "example-controls" },
      keyword, " sort by ", sortBy, sortOrder, " page size ", sizeSelect));
  }
}

export function mount(): App {
  const root = document.getElementById("app");
  if (!root) throw new Error("#app container missing");
  const app = new App(root);
  void app.render();
  return app;
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  mount();
}
