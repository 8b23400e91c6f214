import { afterEach, describe, expect, it, vi } from "vitest";

import { GroupScores } from "../src/api";
import { copyTable, renderGroupScores } from "../src/tables";

const SCORES: GroupScores = {
  metrics: ["bleu"],
  models: ["base", "big"],
  rows: [
    {
      group: "ALL", metric: "bleu", example_count: 4,
      cells: [
        { model: "base", score: 74.19446627365011, best: false, worst: true },
        { model: "big", score: 100.0, best: true, worst: false },
      ],
    },
    {
      group: "long", metric: "bleu", example_count: 2,
      cells: [
        { model: "base", score: 60.5, best: false, worst: true },
        { model: "big", score: 99.25, best: true, worst: false },
      ],
    },
  ],
  notes: ['tag "empty" has no examples; omitted'],
};

afterEach(() => vi.unstubAllGlobals());

describe("group score table", () => {
  it("renders every cell score exactly as sent", () => {
    const host = document.createElement("div");
    renderGroupScores(host, SCORES);
    const values = Array.from(host.querySelectorAll(".score-value"));
    const sent = SCORES.rows.flatMap((row) => row.cells.map((c) => c.score));
    expect(values.map((v) => v.getAttribute("data-score"))).toEqual(
      sent.map(String));
  });

  it("marks best bold and worst italic and shows notes", () => {
    const host = document.createElement("div");
    renderGroupScores(host, SCORES);
    const all = host.querySelector('tr[data-group="ALL"]')!;
    const bigCell = all.querySelector('td[data-model="big"]')!;
    const baseCell = all.querySelector('td[data-model="base"]')!;
    expect(bigCell.querySelector("strong")).not.toBeNull();
    expect(baseCell.querySelector("em.worst")).not.toBeNull();
    expect(host.querySelector(".note")!.textContent).toContain("omitted");
  });

  it("includes a group column only when tag rows exist", () => {
    const host = document.createElement("div");
    renderGroupScores(host, { ...SCORES, rows: [SCORES.rows[0]] });
    const header = Array.from(host.querySelectorAll("th")).map((n) => n.textContent);
    expect(header).toEqual(["metric", "base", "big"]);
  });
});

describe("clipboard export", () => {
  it("writes the API export body to the clipboard byte-for-byte", async () => {
    const body = 'group,metric,base,big\nALL,bleu,74.194,100.000\n"x,y",bleu,1.000,2.000\n';
    const fetchMock = vi.fn(async (path: string) => {
      expect(path).toBe(
        "/api/tasks/mt/sets/wmt/export?table=scores&format=csv&metrics=bleu%2Cchrf");
      return new Response(body, { status: 200 });
    });
    const writeText = vi.fn(async () => {});
    vi.stubGlobal("fetch", fetchMock);
    vi.stubGlobal("navigator", { clipboard: { writeText } });

    const copied = await copyTable("mt", "wmt", "csv", ["bleu", "chrf"]);
    expect(copied).toBe(body);
    expect(writeText).toHaveBeenCalledExactlyOnceWith(body);
  });

  it("passes the latex body through untouched", async () => {
    const body = "metric & base \\\\\nbleu & \\textbf{74.194} \\\\\n";
    vi.stubGlobal("fetch", vi.fn(async () => new Response(body, { status: 200 })));
    const writeText = vi.fn(async () => {});
    vi.stubGlobal("navigator", { clipboard: { writeText } });
    await copyTable("mt", "wmt", "latex");
    expect(writeText).toHaveBeenCalledExactlyOnceWith(body);
  });
});
