import { beforeEach, describe, expect, it, vi } from "vitest";

import { ExamplePage } from "../src/api";
import { renderExamplePage, translateLink } from "../src/examples";

const PAGE: ExamplePage = {
  total: 42,
  page: 2,
  page_size: 10,
  items: [
    {
      index: 7,
      tags: [
        { name: "long", origin: "machine" },
        { name: "news", origin: "user" },
      ],
      sources: [
        { name: "source_0", modality: "text", text: "der Hund läuft" },
        { name: "source_1", modality: "image", url: "/media/mt/wmt/source_1/7.jpg" },
        { name: "source_2", modality: "audio", url: "/media/mt/wmt/source_2/7.wav" },
      ],
      references: [
        { name: "reference_0", text: "the dog runs" },
        { name: "reference_1", text: null },
      ],
      models: [
        {
          model: "base",
          prediction: "the dog sleeps",
          tokens: ["the", "dog", "sleeps"],
          highlights: [
            { start: 0, end: 2, matched: true },
            { start: 2, end: 3, matched: false },
          ],
          scores: [
            { metric: "bleu", score: 61.47912345678, best: true, worst: false },
            { metric: "wer", score: 33.33333333333333, best: false, worst: true },
          ],
        },
      ],
    },
  ],
};

function render(page: ExamplePage = PAGE) {
  const host = document.createElement("div");
  renderExamplePage(host, page, {
    onPage: vi.fn(), onKeyword: vi.fn(), onPageSize: vi.fn(),
  });
  return host;
}

describe("example page rendering is a pure pass-through", () => {
  let host: HTMLElement;
  beforeEach(() => { host = render(); });

  it("shows the payload total verbatim", () => {
    const total = host.querySelector(".total")!;
    expect(total.getAttribute("data-total")).toBe("42");
    expect(total.textContent).toBe("42");
  });

  it("renders every score exactly as sent by the API", () => {
    const values = Array.from(host.querySelectorAll(".score-value"));
    const payloadScores = PAGE.items[0].models[0].scores;
    expect(values.length).toBe(payloadScores.length);
    for (const [node, score] of values.map((n, i) => [n, payloadScores[i]] as const)) {
      expect(node.getAttribute("data-score")).toBe(String(score.score));
      expect(node.getAttribute("data-metric")).toBe(score.metric);
    }
  });

  it("marks best bold and worst italic from the payload flags alone", () => {
    const bleu = host.querySelector('[data-metric="bleu"]')!;
    const wer = host.querySelector('[data-metric="wer"]')!;
    expect(bleu.closest("strong")).not.toBeNull();
    expect(bleu.closest("em")).toBeNull();
    expect(wer.closest("em.worst")).not.toBeNull();
  });

  it("splits the prediction into matched and unmatched spans", () => {
    const spans = Array.from(host.querySelectorAll(".prediction .tokens"));
    expect(spans.map((s) => s.className)).toEqual(
      ["tokens matched", "tokens unmatched"]);
    expect(spans[0].textContent).toBe("the dog");
    expect(spans[1].textContent).toBe("sleeps");
  });

  it("renders sources by modality with media URLs passed through", () => {
    expect(host.querySelector(".source-text")!.textContent).toBe("der Hund läuft");
    expect(host.querySelector("img")!.getAttribute("src"))
      .toBe("/media/mt/wmt/source_1/7.jpg");
    expect(host.querySelector("audio")!.getAttribute("src"))
      .toBe("/media/mt/wmt/source_2/7.wav");
  });

  it("adds an external translate deep-link with the source text encoded", () => {
    const link = host.querySelector(".translate-link")!;
    expect(link.getAttribute("href")).toBe(translateLink("der Hund läuft"));
    expect(link.getAttribute("href")).toContain(
      encodeURIComponent("der Hund läuft"));
    expect(link.getAttribute("target")).toBe("_blank");
  });

  it("renders absent references as an explicit placeholder", () => {
    const refs = Array.from(host.querySelectorAll(".references li"));
    expect(refs[0].textContent).toBe("the dog runs");
    expect(refs[1].querySelector(".absent")).not.toBeNull();
  });

  it("styles user and machine tags differently", () => {
    expect(host.querySelector(".tag-user")!.textContent).toBe("news");
    expect(host.querySelector(".tag-machine")!.textContent).toBe("long");
  });

  it("wires pagination to the handlers", () => {
    const onPage = vi.fn();
    const local = document.createElement("div");
    renderExamplePage(local, PAGE, {
      onPage, onKeyword: vi.fn(), onPageSize: vi.fn(),
    });
    (local.querySelector(".next") as HTMLButtonElement).click();
    expect(onPage).toHaveBeenCalledWith(3);
    (local.querySelector(".prev") as HTMLButtonElement).click();
    expect(onPage).toHaveBeenCalledWith(1);
  });
});
