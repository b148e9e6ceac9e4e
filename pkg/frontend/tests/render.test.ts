import { describe, expect, it } from "vitest";

import { Ctx2D, FieldRenderer } from "../src/render.js";
import { StateMessage } from "../src/protocol.js";

interface ArcCall {
  x: number;
  y: number;
  r: number;
  fill: string | null;
}

/** Records draw calls instead of rasterizing. */
class RecordingCtx implements Ctx2D {
  canvas = { width: 520, height: 520 };
  fillStyle = "";
  strokeStyle = "";
  lineWidth = 1;
  globalAlpha = 1;
  font = "";
  arcs: ArcCall[] = [];
  texts: string[] = [];
  private pendingArc: ArcCall | null = null;

  clearRect() {}
  fillRect() {}
  strokeRect() {}
  beginPath() { this.pendingArc = null; }
  arc(x: number, y: number, r: number) { this.pendingArc = { x, y, r, fill: null }; }
  moveTo() {}
  lineTo() {}
  fill() {
    if (this.pendingArc) {
      this.arcs.push({ ...this.pendingArc, fill: String(this.fillStyle) });
    }
  }
  stroke() {
    if (this.pendingArc) {
      this.arcs.push({ ...this.pendingArc, fill: null });
    }
  }
  setLineDash() {}
  fillText(text: string) { this.texts.push(text); }
}

function state(overrides: Partial<StateMessage> = {}): StateMessage {
  return {
    type: "state", tick: 10, t: 0.1,
    evader: [0.5, 0.5], pursuer: [0.75, 0.25], cursor: [0.5, 0.5],
    error: [0.25, -0.25], delays: [0.8, 0.8], disturbance: [0, 0],
    captured: false, score: 0, lag: false,
    ...overrides,
  };
}

// margin 12 on a 520px canvas: the unit square maps to a 496px box at (12,12)
const SIDE = 496;
const toCanvas = (f: number) => 12 + f * SIDE;

describe("FieldRenderer", () => {
  it("puts a field-center evader at the canvas center", () => {
    const ctx = new RecordingCtx();
    const renderer = new FieldRenderer(ctx);
    expect(renderer.toCanvas(0.5, 0.5)).toEqual([260, 260]);
    expect(renderer.toCanvas(0, 0)).toEqual([12, 12]);
    expect(renderer.toCanvas(1, 1)).toEqual([12 + SIDE, 12 + SIDE]);
  });

  it("draws evader and pursuer markers at the expected canvas coordinates", () => {
    const ctx = new RecordingCtx();
    const renderer = new FieldRenderer(ctx);
    renderer.draw(state(), { captureRadius: 0.05, stale: false });
    const markers = ctx.arcs.filter((a) => a.r === 8 && a.fill !== null);
    expect(markers.length).toBe(2);
    const [evader, pursuer] = markers;
    expect(evader.x).toBeCloseTo(260, 10);
    expect(evader.y).toBeCloseTo(260, 10);
    expect(pursuer.x).toBeCloseTo(toCanvas(0.75), 10);
    expect(pursuer.y).toBeCloseTo(toCanvas(0.25), 10);
  });

  it("scales the capture ring by the field size", () => {
    const ctx = new RecordingCtx();
    const renderer = new FieldRenderer(ctx);
    renderer.draw(state(), { captureRadius: 0.05, stale: false });
    const ring = ctx.arcs.find((a) => Math.abs(a.r - 0.05 * SIDE) < 1e-9);
    expect(ring).toBeDefined();
    expect(ring!.x).toBeCloseTo(260, 10);
  });

  it("announces captures and shows the stale overlay text", () => {
    const ctx = new RecordingCtx();
    const renderer = new FieldRenderer(ctx);
    renderer.draw(state({ captured: true }), { captureRadius: 0.05, stale: false });
    expect(ctx.texts.some((t) => t.includes("CAPTURE"))).toBe(true);

    const ctx2 = new RecordingCtx();
    new FieldRenderer(ctx2).draw(state(), { captureRadius: 0.05, stale: true });
    expect(ctx2.texts.some((t) => t.includes("connection lost"))).toBe(true);
  });

  it("keeps a bounded trail", () => {
    const ctx = new RecordingCtx();
    const renderer = new FieldRenderer(ctx, 12, 30);
    for (let i = 0; i < 100; i++) {
      renderer.draw(state({ evader: [i / 100, 0.5] }), { captureRadius: 0.05, stale: false });
    }
    // no unbounded growth: internals capped at the configured length
    expect((renderer as any).trailEvader.length).toBe(30);
  });
});
