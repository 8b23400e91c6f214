/** Client-rendered SVG charts: zoomable, exportable to SVG or PNG.

The current zoom lives in the SVG viewBox, so exports reflect whatever the
user is looking at.
*/

import { Histogram } from "./api";
import { el } from "./dom";

const SVG_NS = "http://www.w3.org/2000/svg";
export const CHART_WIDTH = 640;
export const CHART_HEIGHT = 280;
const MARGIN = { top: 12, right: 12, bottom: 42, left: 46 };

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K, attrs: Record<string, string | number> = {},
): SVGElementTagNameMap[K] {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    node.setAttribute(key, String(value));
  }
  return node;
}

export interface BarDatum {
  label: string;
  value: number;
}

export function barChart(data: BarDatum[], title = ""): SVGSVGElement {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${CHART_WIDTH} ${CHART_HEIGHT}`,
    width: CHART_WIDTH,
    height: CHART_HEIGHT,
    class: "chart",
    "data-title": title,
  });
  const plotWidth = CHART_WIDTH - MARGIN.left - MARGIN.right;
  const plotHeight = CHART_HEIGHT - MARGIN.top - MARGIN.bottom;
  const peak = Math.max(1e-9, ...data.map((d) => d.value));
  const step = data.length ? plotWidth / data.length : plotWidth;
  const barWidth = Math.max(1, step * 0.82);

  const axis = svgEl("g", { class: "axis" });
  axis.appendChild(svgEl("line", {
    x1: MARGIN.left, y1: MARGIN.top + plotHeight,
    x2: MARGIN.left + plotWidth, y2: MARGIN.top + plotHeight,
    stroke: "#888",
  }));
  axis.appendChild(svgEl("line", {
    x1: MARGIN.left, y1: MARGIN.top,
    x2: MARGIN.left, y2: MARGIN.top + plotHeight,
    stroke: "#888",
  }));
  svg.appendChild(axis);

  data.forEach((datum, i) => {
    const height = (datum.value / peak) * plotHeight;
    const bar = svgEl("rect", {
      class: "bar",
      x: MARGIN.left + i * step + (step - barWidth) / 2,
      y: MARGIN.top + plotHeight - height,
      width: barWidth,
      height,
      "data-value": datum.value,
      "data-label": datum.label,
    });
    bar.appendChild(svgEl("title")).textContent = `${datum.label}: ${datum.value}`;
    svg.appendChild(bar);
    if (data.length <= 24) {
      const text = svgEl("text", {
        x: MARGIN.left + i * step + step / 2,
        y: CHART_HEIGHT - MARGIN.bottom + 14,
        "text-anchor": "middle",
        class: "bar-label",
      });
      text.textContent = datum.label.length > 9
        ? datum.label.slice(0, 8) + "…" : datum.label;
      svg.appendChild(text);
    }
  });
  const peakLabel = svgEl("text", {
    x: MARGIN.left - 6, y: MARGIN.top + 8,
    "text-anchor": "end", class: "bar-label",
  });
  peakLabel.textContent = String(peak);
  svg.appendChild(peakLabel);
  attachZoom(svg);
  return svg;
}

export function histogramChart(hist: Histogram, title = ""): SVGSVGElement {
  const data: BarDatum[] = hist.counts.map((count, i) => ({
    label: formatEdge(hist.bin_edges[i]),
    value: count,
  }));
  return barChart(data, title);
}

function formatEdge(edge: number | undefined): string {
  if (edge === undefined) return "";
  return Number.isInteger(edge) ? String(edge) : edge.toFixed(1);
}

// -- zoom -------------------------------------------------------------------

export function viewBoxOf(svg: SVGSVGElement): [number, number, number, number] {
  const raw = svg.getAttribute("viewBox") ?? `0 0 ${CHART_WIDTH} ${CHART_HEIGHT}`;
  const [x, y, w, h] = raw.split(/\s+/).map(Number);
  return [x, y, w, h];
}

/** Zoom the viewBox by `factor` (>1 zooms in) around fractional center cx, cy. */
export function applyZoom(svg: SVGSVGElement, factor: number,
                          cx = 0.5, cy = 0.5): void {
  const [x, y, w, h] = viewBoxOf(svg);
  const newW = Math.min(CHART_WIDTH * 4, Math.max(CHART_WIDTH / 32, w / factor));
  const newH = Math.min(CHART_HEIGHT * 4, Math.max(CHART_HEIGHT / 32, h / factor));
  const newX = x + (w - newW) * cx;
  const newY = y + (h - newH) * cy;
  svg.setAttribute("viewBox", `${newX} ${newY} ${newW} ${newH}`);
}

export function resetZoom(svg: SVGSVGElement): void {
  svg.setAttribute("viewBox", `0 0 ${CHART_WIDTH} ${CHART_HEIGHT}`);
}

function attachZoom(svg: SVGSVGElement): void {
  svg.addEventListener("wheel", (event) => {
    event.preventDefault();
    const rect = svg.getBoundingClientRect();
    const cx = rect.width ? (event.clientX - rect.left) / rect.width : 0.5;
    const cy = rect.height ? (event.clientY - rect.top) / rect.height : 0.5;
    applyZoom(svg, event.deltaY < 0 ? 1.25 : 0.8, cx, cy);
  });
  svg.addEventListener("dblclick", () => resetZoom(svg));
}

// -- export -----------------------------------------------------------------

export function exportSvgString(svg: SVGSVGElement): string {
  const clone = svg.cloneNode(true) as SVGSVGElement;
  clone.setAttribute("xmlns", SVG_NS);
  return new XMLSerializer().serializeToString(clone);
}

export function exportPng(svg: SVGSVGElement, scale = 2): Promise<Blob> {
  const text = exportSvgString(svg);
  const url = URL.createObjectURL(new Blob([text], { type: "image/svg+xml" }));
  return new Promise((resolve, reject) => {
    const image = new Image();
    image.onload = () => {
      const canvas = document.createElement("canvas");
      canvas.width = CHART_WIDTH * scale;
      canvas.height = CHART_HEIGHT * scale;
      const context = canvas.getContext("2d");
      if (!context) {
        reject(new Error("canvas 2d context unavailable"));
        return;
      }
      context.drawImage(image, 0, 0, canvas.width, canvas.height);
      URL.revokeObjectURL(url);
      canvas.toBlob((blob) =>
        blob ? resolve(blob) : reject(new Error("PNG encoding failed")),
        "image/png");
    };
    image.onerror = () => reject(new Error("SVG rasterization failed"));
    image.src = url;
  });
}

function download(filename: string, blob: Blob): void {
  const link = document.createElement("a");
  link.href = URL.createObjectURL(blob);
  link.download = filename;
  link.click();
  URL.revokeObjectURL(link.href);
}

/** Wrap a chart with SVG/PNG export buttons. */
export function chartWithControls(svg: SVGSVGElement, name: string): HTMLElement {
  return el("figure", { class: "chart-box" },
    svg as unknown as HTMLElement,
    el("figcaption", {},
      el("button", {
        class: "export-svg",
        onclick: () => download(`${name}.svg`,
          new Blob([exportSvgString(svg)], { type: "image/svg+xml" })),
      }, "SVG"),
      " ",
      el("button", {
        class: "export-png",
        onclick: () => { void exportPng(svg).then((blob) => download(`${name}.png`, blob)); },
      }, "PNG")));
}
