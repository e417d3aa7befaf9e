import type { ChartChannel, ChartSpec } from "./types.js";

// Structural preview of a declarative chart document. The document carries
// no data values, so the preview draws the chart's shape: title, labeled
// axes, and a glyph matching the mark. No numbers are invented.

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 420;
const HEIGHT = 260;
const PAD = { left: 56, right: 16, top: 36, bottom: 44 };

export function channelLabel(channel: ChartChannel | undefined): string {
  if (!channel) return "";
  let label = channel.aggregate ? `${channel.aggregate}(${channel.field})` : channel.field;
  if (channel.bin) label += " (binned)";
  return label;
}

function svgEl(tag: string, attrs: Record<string, string>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag) as SVGElement;
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  return node;
}

function text(x: number, y: number, content: string, attrs: Record<string, string> = {}): SVGElement {
  const node = svgEl("text", { x: String(x), y: String(y), ...attrs });
  node.textContent = content;
  return node;
}

function plotGlyphs(mark: ChartSpec["mark"]): SVGElement[] {
  const x0 = PAD.left;
  const y0 = HEIGHT - PAD.bottom;
  const plotW = WIDTH - PAD.left - PAD.right;
  const plotH = HEIGHT - PAD.top - PAD.bottom;
  const glyphs: SVGElement[] = [];
  const heights = [0.35, 0.6, 0.45, 0.8, 0.55];

  switch (mark) {
    case "bar": {
      const band = plotW / heights.length;
      heights.forEach((h, i) => {
        glyphs.push(
          svgEl("rect", {
            x: String(x0 + i * band + band * 0.15),
            y: String(y0 - plotH * h),
            width: String(band * 0.7),
            height: String(plotH * h),
            class: "glyph-bar",
          }),
        );
      });
      break;
    }
    case "line":
    case "area": {
      const points = heights
        .map((h, i) => `${x0 + (plotW * i) / (heights.length - 1)},${y0 - plotH * h}`)
        .join(" ");
      if (mark === "area") {
        glyphs.push(
          svgEl("polygon", {
            points: `${x0},${y0} ${points} ${x0 + plotW},${y0}`,
            class: "glyph-area",
          }),
        );
      }
      glyphs.push(svgEl("polyline", { points, fill: "none", class: "glyph-line" }));
      break;
    }
    case "point": {
      heights.forEach((h, i) => {
        glyphs.push(
          svgEl("circle", {
            cx: String(x0 + plotW * (0.1 + 0.2 * i)),
            cy: String(y0 - plotH * h),
            r: "5",
            class: "glyph-point",
          }),
        );
      });
      break;
    }
    case "arc": {
      const cx = x0 + plotW / 2;
      const cy = y0 - plotH / 2;
      const r = Math.min(plotW, plotH) / 2.4;
      glyphs.push(svgEl("circle", { cx: String(cx), cy: String(cy), r: String(r), class: "glyph-arc" }));
      glyphs.push(
        svgEl("path", {
          d: `M ${cx} ${cy} L ${cx} ${cy - r} A ${r} ${r} 0 0 1 ${cx + r} ${cy} Z`,
          class: "glyph-arc-slice",
        }),
      );
      break;
    }
    case "boxplot": {
      const cx = x0 + plotW / 2;
      const boxW = plotW / 4;
      glyphs.push(
        svgEl("line", {
          x1: String(cx), y1: String(y0 - plotH * 0.9),
          x2: String(cx), y2: String(y0 - plotH * 0.1),
          class: "glyph-whisker",
        }),
        svgEl("rect", {
          x: String(cx - boxW / 2),
          y: String(y0 - plotH * 0.7),
          width: String(boxW),
          height: String(plotH * 0.4),
          class: "glyph-box",
        }),
        svgEl("line", {
          x1: String(cx - boxW / 2), y1: String(y0 - plotH * 0.5),
          x2: String(cx + boxW / 2), y2: String(y0 - plotH * 0.5),
          class: "glyph-median",
        }),
      );
      break;
    }
  }
  return glyphs;
}

export function renderChartSkeleton(spec: ChartSpec): SVGElement {
  const svg = svgEl("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    width: String(WIDTH),
    height: String(HEIGHT),
    class: "chart-skeleton",
    "data-mark": spec.mark,
    role: "img",
  });
  if (spec.title) {
    svg.appendChild(text(WIDTH / 2, 20, spec.title, { "text-anchor": "middle", class: "chart-title" }));
  }
  const x0 = PAD.left;
  const y0 = HEIGHT - PAD.bottom;
  svg.appendChild(svgEl("line", { x1: String(x0), y1: String(y0), x2: String(WIDTH - PAD.right), y2: String(y0), class: "axis" }));
  svg.appendChild(svgEl("line", { x1: String(x0), y1: String(PAD.top), x2: String(x0), y2: String(y0), class: "axis" }));
  for (const glyph of plotGlyphs(spec.mark)) svg.appendChild(glyph);
  svg.appendChild(
    text(x0 + (WIDTH - PAD.left - PAD.right) / 2, HEIGHT - 12, channelLabel(spec.encoding.x), {
      "text-anchor": "middle",
      class: "axis-label axis-label-x",
    }),
  );
  const yLabel = channelLabel(spec.encoding.y);
  if (yLabel) {
    const labelY = text(0, 0, yLabel, { "text-anchor": "middle", class: "axis-label axis-label-y" });
    labelY.setAttribute("transform", `translate(16 ${(PAD.top + y0) / 2}) rotate(-90)`);
    svg.appendChild(labelY);
  }
  if (spec.encoding.color) {
    svg.appendChild(
      text(WIDTH - PAD.right, 20, `color: ${channelLabel(spec.encoding.color)}`, {
        "text-anchor": "end",
        class: "axis-label legend-label",
      }),
    );
  }
  return svg;
}
