/**
 * Live fit panel: empirical compensation points plus the fitted
 * choice-model and logistic curves on a unit square, hand-drawn on a
 * canvas. Layout math lives apart from the stroking so tests can check
 * pixel positions without a canvas.
 */

import type { FitReport, LevelSummary } from "./types.js";

export interface ChartLayout {
  width: number;
  height: number;
  pad: number;
}

export interface ChartPoint {
  pR: number;
  p2: number;
  round: number;
}

export interface ChartModel {
  points: { x: number; y: number; round: number }[];
  curves: { name: "cpt" | "blr"; path: { x: number; y: number }[] }[];
}

export function xPixel(p: number, layout: ChartLayout): number {
  return layout.pad + p * (layout.width - 2 * layout.pad);
}

// canvas y grows downward, probability grows upward
export function yPixel(v: number, layout: ChartLayout): number {
  return layout.height - layout.pad - v * (layout.height - 2 * layout.pad);
}

export function buildModel(
  points: ChartPoint[],
  fit: FitReport | null,
  layout: ChartLayout,
): ChartModel {
  const model: ChartModel = {
    points: points.map((pt) => ({
      x: xPixel(pt.pR, layout),
      y: yPixel(pt.p2, layout),
      round: pt.round,
    })),
    curves: [],
  };
  if (fit) {
    for (const name of ["blr", "cpt"] as const) {
      model.curves.push({
        name,
        path: fit.curves[name].map(([p, v]) => ({
          x: xPixel(p, layout),
          y: yPixel(v, layout),
        })),
      });
    }
  }
  return model;
}

export function pointsFromLevels(levels: LevelSummary[], round = 0): ChartPoint[] {
  return levels.map((lv) => ({ pR: lv.pR, p2: lv.p2, round }));
}

const CURVE_COLORS = { blr: "#c0392b", cpt: "#27ae60" };

export function drawChart(
  ctx: CanvasRenderingContext2D,
  model: ChartModel,
  layout: ChartLayout,
): void {
  const { width, height, pad } = layout;
  ctx.clearRect(0, 0, width, height);

  // frame and midlines
  ctx.strokeStyle = "#888";
  ctx.lineWidth = 1;
  ctx.strokeRect(pad, pad, width - 2 * pad, height - 2 * pad);
  ctx.strokeStyle = "#ddd";
  ctx.beginPath();
  ctx.moveTo(xPixel(0, layout), yPixel(0.5, layout));
  ctx.lineTo(xPixel(1, layout), yPixel(0.5, layout));
  ctx.stroke();

  ctx.fillStyle = "#555";
  ctx.font = "11px sans-serif";
  ctx.fillText("0", pad - 4, height - pad + 12);
  ctx.fillText("1", width - pad - 4, height - pad + 12);
  ctx.fillText("P(compensate)", pad, pad - 6);
  ctx.fillText("disturbance probability", width / 2 - 40, height - 4);

  for (const curve of model.curves) {
    ctx.strokeStyle = CURVE_COLORS[curve.name];
    ctx.lineWidth = 1.5;
    ctx.beginPath();
    curve.path.forEach((pt, i) => {
      if (i === 0) {
        ctx.moveTo(pt.x, pt.y);
      } else {
        ctx.lineTo(pt.x, pt.y);
      }
    });
    ctx.stroke();
  }

  // first round solid, later rounds as rings
  for (const pt of model.points) {
    ctx.beginPath();
    ctx.arc(pt.x, pt.y, 4, 0, 2 * Math.PI);
    if (pt.round === 0) {
      ctx.fillStyle = "#2980b9";
      ctx.fill();
    } else {
      ctx.strokeStyle = "#2980b9";
      ctx.lineWidth = 1.5;
      ctx.stroke();
    }
  }
}
