// Play-field renderer.  Draws only what the latest state message says: the
// unit square mapped into the canvas with aspect preserved, agent markers,
// the cursor ghost, the capture ring, and trailing paths.

import { StateMessage } from "./protocol.js";

// structural subset of CanvasRenderingContext2D, so tests can pass a recorder
export interface Ctx2D {
  canvas: { width: number; height: number };
  fillStyle: string | CanvasGradient | CanvasPattern;
  strokeStyle: string | CanvasGradient | CanvasPattern;
  lineWidth: number;
  globalAlpha: number;
  font: string;
  clearRect(x: number, y: number, w: number, h: number): void;
  fillRect(x: number, y: number, w: number, h: number): void;
  strokeRect(x: number, y: number, w: number, h: number): void;
  beginPath(): void;
  arc(x: number, y: number, r: number, a0: number, a1: number): void;
  moveTo(x: number, y: number): void;
  lineTo(x: number, y: number): void;
  fill(): void;
  stroke(): void;
  setLineDash(segments: number[]): void;
  fillText(text: string, x: number, y: number): void;
}

export interface RenderOptions {
  captureRadius: number;
  stale: boolean;
}

export const COLORS = {
  field: "#10141c",
  border: "#3a4358",
  evader: "#e24a4a",   // red: evader position
  pursuer: "#4a86e2",
  cursor: "#9aa4b8",
  capture: "#57d98a",
  staleOverlay: "rgba(16, 20, 28, 0.55)",
};

export class FieldRenderer {
  private trailEvader: [number, number][] = [];
  private trailPursuer: [number, number][] = [];

  constructor(private ctx: Ctx2D, private margin = 12, private trailLength = 240) {}

  /** Aspect-preserving map from unit-square field coordinates to canvas pixels. */
  toCanvas(fx: number, fy: number): [number, number] {
    const { width, height } = this.ctx.canvas;
    const side = Math.min(width, height) - 2 * this.margin;
    const ox = (width - side) / 2;
    const oy = (height - side) / 2;
    return [ox + fx * side, oy + fy * side];
  }

  private fieldScale(): number {
    const { width, height } = this.ctx.canvas;
    return Math.min(width, height) - 2 * this.margin;
  }

  private dot(fx: number, fy: number, r: number, color: string): void {
    const [cx, cy] = this.toCanvas(fx, fy);
    this.ctx.beginPath();
    this.ctx.arc(cx, cy, r, 0, 2 * Math.PI);
    this.ctx.fillStyle = color;
    this.ctx.fill();
  }

  private path(points: [number, number][], color: string): void {
    if (points.length < 2) return;
    this.ctx.beginPath();
    const [x0, y0] = this.toCanvas(points[0][0], points[0][1]);
    this.ctx.moveTo(x0, y0);
    for (let i = 1; i < points.length; i++) {
      const [x, y] = this.toCanvas(points[i][0], points[i][1]);
      this.ctx.lineTo(x, y);
    }
    this.ctx.strokeStyle = color;
    this.ctx.lineWidth = 1;
    this.ctx.globalAlpha = 0.45;
    this.ctx.stroke();
    this.ctx.globalAlpha = 1;
  }

  reset(): void {
    this.trailEvader = [];
    this.trailPursuer = [];
  }

  draw(state: StateMessage, opts: RenderOptions): void {
    const ctx = this.ctx;
    const { width, height } = ctx.canvas;

    this.trailEvader.push([state.evader[0], state.evader[1]]);
    this.trailPursuer.push([state.pursuer[0], state.pursuer[1]]);
    if (this.trailEvader.length > this.trailLength) this.trailEvader.shift();
    if (this.trailPursuer.length > this.trailLength) this.trailPursuer.shift();

    ctx.clearRect(0, 0, width, height);
    ctx.fillStyle = COLORS.field;
    ctx.fillRect(0, 0, width, height);

    const [ox, oy] = this.toCanvas(0, 0);
    const side = this.fieldScale();
    ctx.strokeStyle = COLORS.border;
    ctx.lineWidth = 1;
    ctx.setLineDash([]);
    ctx.strokeRect(ox, oy, side, side);

    this.path(this.trailEvader, COLORS.evader);
    this.path(this.trailPursuer, COLORS.pursuer);

    // capture ring around the evader
    const [ex, ey] = this.toCanvas(state.evader[0], state.evader[1]);
    ctx.beginPath();
    ctx.arc(ex, ey, opts.captureRadius * side, 0, 2 * Math.PI);
    ctx.strokeStyle = state.captured ? COLORS.capture : COLORS.border;
    ctx.lineWidth = state.captured ? 3 : 1;
    ctx.setLineDash([4, 4]);
    ctx.stroke();
    ctx.setLineDash([]);

    // cursor ghost, then the agents on top
    this.dot(state.cursor[0], state.cursor[1], 4, COLORS.cursor);
    this.dot(state.evader[0], state.evader[1], 8, COLORS.evader);
    this.dot(state.pursuer[0], state.pursuer[1], 8, COLORS.pursuer);

    if (state.captured) {
      ctx.fillStyle = COLORS.capture;
      ctx.font = "bold 24px sans-serif";
      ctx.fillText("CAPTURE!", width / 2 - 55, oy + 30);
    }

    if (opts.stale) {
      // connection lost: keep the last frame, dim it
      ctx.fillStyle = COLORS.staleOverlay;
      ctx.fillRect(0, 0, width, height);
      ctx.fillStyle = "#d7dce6";
      ctx.font = "16px sans-serif";
      ctx.fillText("connection lost - reconnecting", width / 2 - 110, height / 2);
    }
  }
}
