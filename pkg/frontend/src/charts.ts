// Rolling strip charts of the eight telemetry signals, ten seconds deep.
// Colour code follows the classic animation: red evader position, green
// disturbances, blue delays, black (light theme: bright) errors.

import { Ctx2D } from "./render.js";
import { StateMessage } from "./protocol.js";

interface Sample {
  t: number;
  values: number[]; // xe, ye, dx, dy, tau1, tau2, ex, ey
}

interface Strip {
  label: string;
  color: string;
  indices: [number, number];
}

const STRIPS: Strip[] = [
  { label: "evader x/y", color: "#e24a4a", indices: [0, 1] },
  { label: "disturbance x/y", color: "#49b265", indices: [2, 3] },
  { label: "delays 1/2", color: "#4a86e2", indices: [4, 5] },
  { label: "error x/y", color: "#e8ecf4", indices: [6, 7] },
];

export class StripCharts {
  private window: Sample[] = [];

  constructor(private ctx: Ctx2D, private seconds = 10) {}

  get depth(): number {
    return this.window.length;
  }

  push(state: StateMessage): void {
    this.window.push({
      t: state.t,
      values: [
        state.evader[0], state.evader[1],
        state.disturbance[0], state.disturbance[1],
        state.delays[0], state.delays[1],
        state.error[0], state.error[1],
      ],
    });
    const cutoff = state.t - this.seconds;
    while (this.window.length > 1 && this.window[0].t < cutoff) {
      this.window.shift();
    }
  }

  clear(): void {
    this.window = [];
  }

  draw(): void {
    const ctx = this.ctx;
    const { width, height } = ctx.canvas;
    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = "#10141c";
    ctx.fillRect(0, 0, width, height);
    if (this.window.length < 2) return;

    const rows = STRIPS.length;
    const rowH = height / rows;
    const t1 = this.window[this.window.length - 1].t;
    const t0 = Math.max(this.window[0].t, t1 - this.seconds);
    const span = Math.max(t1 - t0, 1e-6);

    STRIPS.forEach((strip, row) => {
      const yTop = row * rowH + 4;
      const yBot = (row + 1) * rowH - 4;

      // per-strip autoscale with a little headroom
      let lo = Infinity;
      let hi = -Infinity;
      for (const s of this.window) {
        for (const idx of strip.indices) {
          lo = Math.min(lo, s.values[idx]);
          hi = Math.max(hi, s.values[idx]);
        }
      }
      if (!(hi > lo)) {
        hi = lo + 1;
      }
      const pad = 0.08 * (hi - lo);
      lo -= pad;
      hi += pad;

      const toY = (v: number) => yBot - ((v - lo) / (hi - lo)) * (yBot - yTop);
      const toX = (t: number) => ((t - t0) / span) * width;

      strip.indices.forEach((idx, which) => {
        ctx.beginPath();
        let started = false;
        for (const s of this.window) {
          if (s.t < t0) continue;
          const x = toX(s.t);
          const y = toY(s.values[idx]);
          if (!started) {
            ctx.moveTo(x, y);
            started = true;
          } else {
            ctx.lineTo(x, y);
          }
        }
        ctx.strokeStyle = strip.color;
        ctx.lineWidth = 1;
        ctx.globalAlpha = which === 0 ? 1.0 : 0.55;
        ctx.setLineDash(which === 0 ? [] : [3, 3]);
        ctx.stroke();
      });
      ctx.globalAlpha = 1;
      ctx.setLineDash([]);

      ctx.fillStyle = strip.color;
      ctx.font = "11px sans-serif";
      ctx.fillText(strip.label, 6, yTop + 11);
      ctx.fillStyle = "#6b7488";
      ctx.fillText(hi.toFixed(2), width - 44, yTop + 11);
      ctx.fillText(lo.toFixed(2), width - 44, yBot - 2);
    });
  }
}
