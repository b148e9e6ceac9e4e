// Session orchestration: a latest-state holder decouples message arrival
// from the display-refresh render loop; mouse movement over the field
// canvas becomes the evader command.

import { StripCharts } from "./charts.js";
import { SocketClient } from "./net.js";
import { StateMessage } from "./protocol.js";
import { ControlPanel } from "./panel.js";
import { FieldRenderer } from "./render.js";

export interface AppElements {
  field: HTMLCanvasElement;
  charts: HTMLCanvasElement;
  panelHost: HTMLElement;
  eventLog: HTMLElement;
}

export class App {
  private latest: StateMessage | null = null;
  private connected = false;
  private renderer: FieldRenderer;
  private charts: StripCharts;
  private panel: ControlPanel;
  private socket: SocketClient;

  constructor(private els: AppElements, wsUrl: string, private captureRadius = 0.05) {
    this.socket = new SocketClient(wsUrl, {
      onState: (msg) => {
        this.latest = msg;
        this.charts.push(msg);
        this.panel.onState(msg);
      },
      onAck: (msg) => this.panel.onAck(msg),
      onRound: (msg) => {
        this.log(`${msg.event === "capture" ? "captured" : "evader escaped"} `
          + `at t=${msg.t.toFixed(2)} s (score ${msg.score})`);
        if (msg.event === "escape") this.renderer.reset();
      },
      onServerError: (msg) => this.log(`server: ${msg.message}`),
      onStatus: (up) => {
        this.connected = up;
        this.panel.onStatus(up);
      },
    });

    const fieldCtx = this.els.field.getContext("2d");
    const chartCtx = this.els.charts.getContext("2d");
    if (!fieldCtx || !chartCtx) throw new Error("canvas 2d context unavailable");
    this.renderer = new FieldRenderer(fieldCtx);
    this.charts = new StripCharts(chartCtx);
    this.panel = new ControlPanel(this.socket);
    this.els.panelHost.appendChild(this.panel.root);

    this.els.field.addEventListener("mousemove", (ev) => this.onMouse(ev));
  }

  /** Canvas pixel position -> field coordinates -> cursor message. */
  onMouse(ev: MouseEvent): void {
    const rect = this.els.field.getBoundingClientRect();
    const px = ((ev.clientX - rect.left) / rect.width) * this.els.field.width;
    const py = ((ev.clientY - rect.top) / rect.height) * this.els.field.height;
    const [fx, fy] = this.canvasToField(px, py);
    this.socket.sendCursor(fx, fy);
  }

  canvasToField(px: number, py: number): [number, number] {
    const { width, height } = this.els.field;
    const margin = 12;
    const side = Math.min(width, height) - 2 * margin;
    const ox = (width - side) / 2;
    const oy = (height - side) / 2;
    return [(px - ox) / side, (py - oy) / side]; // clamping happens on send
  }

  start(): void {
    this.socket.connect();
    const frame = () => {
      if (this.latest) {
        this.renderer.draw(this.latest, {
          captureRadius: this.captureRadius,
          stale: !this.connected,
        });
        this.charts.draw();
      }
      requestAnimationFrame(frame);
    };
    requestAnimationFrame(frame);
  }

  private log(text: string): void {
    const line = document.createElement("div");
    line.textContent = text;
    this.els.eventLog.prepend(line);
    while (this.els.eventLog.childElementCount > 8) {
      this.els.eventLog.lastElementChild?.remove();
    }
  }
}
