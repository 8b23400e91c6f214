/** View state, fully serialized into the URL so every page is bookmarkable. */

export type Tab = "examples" | "stats" | "ngrams" | "scores" | "tags";

export const TABS: Tab[] = ["examples", "stats", "ngrams", "scores", "tags"];

export const PAGE_SIZES = [10, 25, 50, 100];

export interface ViewState {
  task: string;
  set: string;
  tab: Tab;
  models: string[];
  page: number;
  pageSize: number;
  sortBy: string;
  sortOrder: "asc" | "desc";
  keyword: string;
  tags: string[];
  metrics: string[];
}

export function defaultState(): ViewState {
  return {
    task: "",
    set: "",
    tab: "examples",
    models: [],
    page: 1,
    pageSize: 25,
    sortBy: "index",
    sortOrder: "asc",
    keyword: "",
    tags: [],
    metrics: [],
  };
}

/** Serialize to a query string; default values are omitted. */
export function serializeViewState(state: ViewState): string {
  const params = new URLSearchParams();
  if (state.task) params.set("task", state.task);
  if (state.set) params.set("set", state.set);
  if (state.tab !== "examples") params.set("tab", state.tab);
  if (state.models.length) params.set("models", state.models.join(","));
  if (state.page !== 1) params.set("page", String(state.page));
  if (state.pageSize !== 25) params.set("page_size", String(state.pageSize));
  if (state.sortBy !== "index") params.set("sort_by", state.sortBy);
  if (state.sortOrder !== "asc") params.set("sort_order", state.sortOrder);
  if (state.keyword) params.set("keyword", state.keyword);
  if (state.tags.length) params.set("tags", state.tags.join(","));
  if (state.metrics.length) params.set("metrics", state.metrics.join(","));
  const query = params.toString();
  return query ? `?${query}` : "";
}

export function parseViewState(search: string): ViewState {
  const params = new URLSearchParams(search);
  const state = defaultState();
  state.task = params.get("task") ?? "";
  state.set = params.get("set") ?? "";
  const tab = params.get("tab");
  if (tab && (TABS as string[]).includes(tab)) state.tab = tab as Tab;
  state.models = splitList(params.get("models"));
  const page = Number(params.get("page"));
  if (Number.isInteger(page) && page >= 1) state.page = page;
  const pageSize = Number(params.get("page_size"));
  if (PAGE_SIZES.includes(pageSize)) state.pageSize = pageSize;
  state.sortBy = params.get("sort_by") ?? "index";
  state.sortOrder = params.get("sort_order") === "desc" ? "desc" : "asc";
  state.keyword = params.get("keyword") ?? "";
  state.tags = splitList(params.get("tags"));
  state.metrics = splitList(params.get("metrics"));
  return state;
}

function splitList(raw: string | null): string[] {
  if (!raw) return [];
  return raw.split(",").filter((part) => part.length > 0);
}

/** The exact API request path the examples tab issues for this state. */
export function examplesRequestPath(state: ViewState): string {
  const params = new URLSearchParams();
  params.set("page", String(state.page));
  params.set("page_size", String(state.pageSize));
  params.set("sort_by", state.sortBy);
  params.set("sort_order", state.sortOrder);
  if (state.keyword) params.set("keyword", state.keyword);
  if (state.tags.length) params.set("tags", state.tags.join(","));
  if (state.models.length) params.set("models", state.models.join(","));
  if (state.metrics.length) params.set("metrics", state.metrics.join(","));
  return `/api/tasks/${encodeURIComponent(state.task)}/sets/` +
    `${encodeURIComponent(state.set)}/examples?${params.toString()}`;
}

export function scoresRequestQuery(state: ViewState, groupByTags: boolean): string {
  const params = new URLSearchParams();
  if (state.metrics.length) params.set("metrics", state.metrics.join(","));
  if (state.models.length) params.set("models", state.models.join(","));
  if (groupByTags) params.set("group_by", "tags");
  const query = params.toString();
  return query ? `?${query}` : "";
}
