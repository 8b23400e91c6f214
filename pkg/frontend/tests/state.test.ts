import { describe, expect, it } from "vitest";

import {
  defaultState,
  examplesRequestPath,
  parseViewState,
  scoresRequestQuery,
  serializeViewState,
  ViewState,
} from "../src/state";

function fullState(): ViewState {
  return {
    task: "mt",
    set: "wmt",
    tab: "ngrams",
    models: ["base", "big"],
    page: 3,
    pageSize: 50,
    sortBy: "bleu",
    sortOrder: "desc",
    keyword: "the cat",
    tags: ["long", "rare_words"],
    metrics: ["bleu", "chrf"],
  };
}

describe("view state URL round trip", () => {
  it("restores every field", () => {
    const state = fullState();
    expect(parseViewState(serializeViewState(state))).toEqual(state);
  });

  it("round-trips the defaults to an empty query", () => {
    const state = { ...defaultState(), task: "mt", set: "wmt" };
    const query = serializeViewState(state);
    expect(query).toBe("?task=mt&set=wmt");
    expect(parseViewState(query)).toEqual(state);
  });

  it("produces identical API requests after a round trip", () => {
    for (const state of [fullState(), { ...defaultState(), task: "t", set: "s" }]) {
      const restored = parseViewState(serializeViewState(state));
      expect(examplesRequestPath(restored)).toBe(examplesRequestPath(state));
      expect(scoresRequestQuery(restored, true)).toBe(scoresRequestQuery(state, true));
      expect(scoresRequestQuery(restored, false)).toBe(scoresRequestQuery(state, false));
    }
  });

  it("keeps url-hostile keywords intact", () => {
    const state = { ...defaultState(), task: "t", set: "s", keyword: "a b&c=d%" };
    const restored = parseViewState(serializeViewState(state));
    expect(restored.keyword).toBe("a b&c=d%");
    expect(examplesRequestPath(restored)).toBe(examplesRequestPath(state));
  });

  it("ignores malformed values", () => {
    const state = parseViewState("?page=zero&page_size=17&tab=bogus&sort_order=up");
    expect(state.page).toBe(1);
    expect(state.pageSize).toBe(25);
    expect(state.tab).toBe("examples");
    expect(state.sortOrder).toBe("asc");
  });
});
