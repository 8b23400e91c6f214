/** Typed client for the evaluation service API. Field names mirror the wire JSON. */

export interface SetEntry {
  task: string;
  name: string;
  models: string[];
  example_count: number;
  valid: boolean;
}

export interface HighlightSpan {
  start: number;
  end: number;
  matched: boolean;
}

export interface SentenceScore {
  metric: string;
  score: number;
  best: boolean;
  worst: boolean;
}

export interface ModelEntry {
  model: string;
  prediction: string;
  tokens: string[];
  highlights: HighlightSpan[];
  scores: SentenceScore[];
}

export interface SourceEntry {
  name: string;
  modality: string;
  text?: string;
  url?: string;
}

export interface ExampleItem {
  index: number;
  tags: { name: string; origin: string }[];
  sources: SourceEntry[];
  references: { name: string; text: string | null }[];
  models: ModelEntry[];
}

export interface ExamplePage {
  total: number;
  page: number;
  page_size: number;
  items: ExampleItem[];
}

export interface GroupCell {
  model: string;
  score: number;
  best: boolean;
  worst: boolean;
}

export interface GroupRow {
  group: string;
  metric: string;
  example_count: number;
  cells: GroupCell[];
}

export interface GroupScores {
  metrics: string[];
  models: string[];
  rows: GroupRow[];
  notes: string[];
}

export interface Histogram {
  bin_edges: number[];
  counts: number[];
}

export interface StreamStats {
  stream: string;
  kind: string;
  sentence_count: number;
  token_count: number;
  char_count: number;
  length_histogram: Histogram;
  token_frequency: [string, number][];
}

export interface DatasetStats {
  streams: StreamStats[];
}

export interface NGramEntry {
  ngram: string;
  count: number;
  examples: number[];
}

export type NGramTable = Record<string, NGramEntry[]>;

export interface TagCount {
  name: string;
  count: number;
}

export interface ScoreDist {
  metric: string;
  bins: number;
  models: Record<string, Histogram>;
}

export interface IngestReport {
  ok: boolean;
  task: string;
  eval_set: string;
  files: string[];
  example_count: number;
  models: string[];
  violations: { subject: string; detail: string }[];
}

async function getJson<T>(path: string, signal?: AbortSignal): Promise<T> {
  const response = await fetch(path, { signal });
  if (!response.ok) {
    const body = await response.text();
    throw new Error(`${response.status} ${path}: ${body.slice(0, 300)}`);
  }
  return response.json() as Promise<T>;
}

export const api = {
  tasks: (signal?: AbortSignal) =>
    getJson<{ tasks: string[] }>("/api/tasks", signal),
  sets: (task: string, signal?: AbortSignal) =>
    getJson<{ sets: SetEntry[] }>(`/api/tasks/${enc(task)}/sets`, signal),
  models: (task: string, set: string, signal?: AbortSignal) =>
    getJson<{ models: string[] }>(
      `/api/tasks/${enc(task)}/sets/${enc(set)}/models`, signal),
  examples: (path: string, signal?: AbortSignal) =>
    getJson<ExamplePage>(path, signal),
  scores: (task: string, set: string, query: string, signal?: AbortSignal) =>
    getJson<GroupScores>(
      `/api/tasks/${enc(task)}/sets/${enc(set)}/scores${query}`, signal),
  stats: (task: string, set: string, signal?: AbortSignal) =>
    getJson<DatasetStats>(
      `/api/tasks/${enc(task)}/sets/${enc(set)}/stats`, signal),
  ngrams: (task: string, set: string, k: number, signal?: AbortSignal) =>
    getJson<NGramTable>(
      `/api/tasks/${enc(task)}/sets/${enc(set)}/ngrams?k=${k}`, signal),
  tags: (task: string, set: string, signal?: AbortSignal) =>
    getJson<{ tags: TagCount[] }>(
      `/api/tasks/${enc(task)}/sets/${enc(set)}/tags`, signal),
  scoreDist: (task: string, set: string, metric: string, signal?: AbortSignal) =>
    getJson<ScoreDist>(
      `/api/tasks/${enc(task)}/sets/${enc(set)}/score_dist?metric=${enc(metric)}`,
      signal),
  /** Raw export body; the UI forwards these bytes untouched. */
  exportBody: async (task: string, set: string, table: string, format: string,
                     metrics?: string[]): Promise<string> => {
    let path = `/api/tasks/${enc(task)}/sets/${enc(set)}/export` +
      `?table=${enc(table)}&format=${enc(format)}`;
    if (metrics && metrics.length) path += `&metrics=${enc(metrics.join(","))}`;
    const response = await fetch(path);
    if (!response.ok) throw new Error(`${response.status} ${path}`);
    return response.text();
  },
};

function enc(part: string): string {
  return encodeURIComponent(part);
}
