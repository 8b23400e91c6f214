/** Upload flow: multipart zip post with progress and an ingestion report. */

import { IngestReport } from "./api";
import { append, clear, el } from "./dom";

export interface UploadResult {
  status: number;
  body: IngestReport | { error?: string; violations?: { subject: string; detail: string }[] };
}

export type UploadTransport = (
  file: File, onProgress: (fraction: number) => void,
) => Promise<UploadResult>;

/** Default transport: XHR to /api/upload (fetch has no upload progress). */
export const xhrTransport: UploadTransport = (file, onProgress) =>
  new Promise((resolve, reject) => {
    const request = new XMLHttpRequest();
    request.open("POST", "/api/upload");
    request.upload.onprogress = (event) => {
      if (event.lengthComputable) onProgress(event.loaded / event.total);
    };
    request.onload = () => {
      let body: UploadResult["body"];
      try {
        body = JSON.parse(request.responseText);
      } catch {
        body = { error: request.responseText.slice(0, 300) };
      }
      resolve({ status: request.status, body });
    };
    request.onerror = () => reject(new Error("network error"));
    const form = new FormData();
    form.append("file", file);
    request.send(form);
  });

export interface UploadHandlers {
  onInstalled(task: string, set: string): void;
}

export function renderUpload(container: HTMLElement, handlers: UploadHandlers,
                             transport: UploadTransport = xhrTransport): void {
  const report = el("div", { class: "upload-report" });
  const progress = el("progress", { max: "1", value: "0", class: "upload-progress" });
  const input = el("input", { type: "file", accept: ".zip" }) as HTMLInputElement;

  const start = () => {
    const file = input.files && input.files[0];
    if (!file) return;
    clear(report);
    transport(file, (fraction) => progress.setAttribute("value", String(fraction)))
      .then((result) => showResult(result, file))
      .catch(() => showNetworkError(file));
  };

  const showResult = (result: UploadResult, file: File) => {
    clear(report);
    if (result.status === 201) {
      const body = result.body as IngestReport;
      append(report,
        el("p", { class: "upload-ok" },
          `installed ${body.task}/${body.eval_set} — ${body.example_count} examples, ` +
          `models: ${body.models.join(", ") || "none"}`),
        el("button", {
          class: "goto-set",
          onclick: () => handlers.onInstalled(body.task, body.eval_set),
        }, "open"));
      return;
    }
    const body = result.body as { error?: string; violations?: { subject: string; detail: string }[] };
    append(report, el("p", { class: "upload-error" },
      `upload rejected (${result.status}): ${body.error ?? ""}`));
    if (body.violations && body.violations.length) {
      const list = el("ul", { class: "violations" });
      for (const violation of body.violations) {
        append(list, el("li", {}, `${violation.subject}: ${violation.detail}`));
      }
      append(report, list);
    }
  };

  const showNetworkError = (file: File) => {
    clear(report);
    append(report,
      el("p", { class: "upload-error" }, "network error during upload"),
      el("button", { class: "retry", onclick: start }, "retry"));
  };

  append(container,
    el("div", { class: "upload-box" },
      el("p", {}, "Pack one <task>/<eval set>/ tree into a zip and upload it:"),
      input,
      el("button", { class: "upload-start", onclick: start }, "upload"),
      progress),
    report);
}
