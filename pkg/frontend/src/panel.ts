// Control panel: delay presets, manual delay entry, disturbance form, and
// round controls.  Every action emits a wire message; displayed settings
// reflect the server's config_ack, never local optimism.

import { SocketClient } from "./net.js";
import { ConfigAckMessage, DisturbanceForm, PresetName, StateMessage } from "./protocol.js";

const PRESETS: { name: PresetName; label: string }[] = [
  { name: "off", label: "Off (0)" },
  { name: "unstable", label: "Unstable (0.6)" },
  { name: "stable", label: "Stable (0.8)" },
  { name: "critical", label: "Critical (1.035)" },
];

export class ControlPanel {
  readonly root: HTMLDivElement;
  private delayReadout: HTMLSpanElement;
  private scoreReadout: HTMLSpanElement;
  private statusReadout: HTMLSpanElement;
  private lagBadge: HTMLSpanElement;
  private manualError: HTMLSpanElement;
  private disturbError: HTMLSpanElement;
  private presetButtons = new Map<PresetName, HTMLButtonElement>();
  private pauseButton: HTMLButtonElement;

  constructor(private socket: SocketClient) {
    this.root = document.createElement("div");
    this.root.className = "panel";
    this.root.innerHTML = `
      <div class="panel-row readouts">
        <span class="readout">delays <span id="delay-readout">-</span></span>
        <span class="readout">score <span id="score-readout">0</span></span>
        <span class="readout" id="status-readout">connecting</span>
        <span class="badge hidden" id="lag-badge">LAG</span>
      </div>
      <fieldset>
        <legend>delay preset</legend>
        <div class="panel-row" id="preset-buttons"></div>
      </fieldset>
      <fieldset>
        <legend>manual delays</legend>
        <div class="panel-row">
          <label>tau1 <input id="tau1-input" type="number" step="0.05" min="0" value="0.8"></label>
          <label>tau2 <input id="tau2-input" type="number" step="0.05" min="0" value="0.8"></label>
          <button id="apply-delays">apply</button>
          <span class="error-text hidden" id="manual-error"></span>
        </div>
      </fieldset>
      <fieldset>
        <legend>disturbance</legend>
        <div class="panel-row">
          <label>kind
            <select id="dist-kind">
              <option value="step">step</option>
              <option value="pulse">pulse</option>
              <option value="sine">sine</option>
            </select>
          </label>
          <label>amplitude <input id="dist-amp" type="number" step="0.1" value="1.0"></label>
          <label>duration <input id="dist-dur" type="number" step="0.1" value="1.0"></label>
          <label>freq <input id="dist-freq" type="number" step="0.1" value="0.5"></label>
          <label>channel
            <select id="dist-channel">
              <option value="x">x</option>
              <option value="y">y</option>
            </select>
          </label>
          <button id="dist-apply">inject</button>
          <span class="error-text hidden" id="dist-error"></span>
        </div>
      </fieldset>
      <div class="panel-row">
        <button id="pause-btn">pause</button>
        <button id="reset-btn">reset round</button>
      </div>
    `;

    const q = <T extends HTMLElement>(sel: string) => this.root.querySelector(sel) as T;
    this.delayReadout = q("#delay-readout");
    this.scoreReadout = q("#score-readout");
    this.statusReadout = q("#status-readout");
    this.lagBadge = q("#lag-badge");
    this.manualError = q("#manual-error");
    this.disturbError = q("#dist-error");
    this.pauseButton = q("#pause-btn");

    const presetRow = q("#preset-buttons");
    for (const preset of PRESETS) {
      const btn = document.createElement("button");
      btn.textContent = preset.label;
      btn.addEventListener("click", () => this.socket.sendPreset(preset.name));
      this.presetButtons.set(preset.name, btn);
      presetRow.appendChild(btn);
    }

    q("#apply-delays").addEventListener("click", () => this.applyManualDelays());
    q("#dist-apply").addEventListener("click", () => this.applyDisturbance());
    this.pauseButton.addEventListener("click", () => this.socket.sendPause());
    q("#reset-btn").addEventListener("click", () => this.socket.sendReset());
  }

  /** Validate the manual fields; bad values show inline and send nothing. */
  applyManualDelays(): void {
    const tau1 = Number((this.root.querySelector("#tau1-input") as HTMLInputElement).value);
    const tau2 = Number((this.root.querySelector("#tau2-input") as HTMLInputElement).value);
    const err = this.validateDelays(tau1, tau2);
    if (err) {
      this.manualError.textContent = err;
      this.manualError.classList.remove("hidden");
      return;
    }
    this.manualError.classList.add("hidden");
    this.socket.sendDelays(tau1, tau2);
  }

  validateDelays(tau1: number, tau2: number): string | null {
    if (!Number.isFinite(tau1) || !Number.isFinite(tau2)) return "delays must be numbers";
    if (tau1 < 0 || tau2 < 0) return "delays must be >= 0";
    return null;
  }

  applyDisturbance(): void {
    const get = (sel: string) => (this.root.querySelector(sel) as HTMLInputElement).value;
    const kind = get("#dist-kind") as DisturbanceForm["kind"];
    const amplitude = Number(get("#dist-amp"));
    const form: DisturbanceForm = {
      kind,
      amplitude,
      channel: get("#dist-channel") as "x" | "y",
    };
    if (kind === "pulse") form.duration = Number(get("#dist-dur"));
    if (kind === "sine") form.frequency = Number(get("#dist-freq"));
    const err = this.validateDisturbance(form);
    if (err) {
      this.disturbError.textContent = err;
      this.disturbError.classList.remove("hidden");
      return;
    }
    this.disturbError.classList.add("hidden");
    this.socket.sendDisturbance(form);
  }

  validateDisturbance(form: DisturbanceForm): string | null {
    if (!Number.isFinite(form.amplitude)) return "amplitude must be a number";
    if (form.kind === "pulse" && !(form.duration! > 0)) return "pulse needs duration > 0";
    if (form.kind === "sine" && !(form.frequency! > 0)) return "sine needs frequency > 0";
    return null;
  }

  /** Reflect an acknowledged configuration change. */
  onAck(ack: ConfigAckMessage): void {
    this.delayReadout.textContent = `${ack.delays[0].toFixed(3)} / ${ack.delays[1].toFixed(3)}`;
    for (const [name, btn] of this.presetButtons) {
      btn.classList.toggle("active", ack.preset === name);
    }
    this.pauseButton.textContent = ack.paused ? "resume" : "pause";
  }

  onState(state: StateMessage): void {
    this.delayReadout.textContent =
      `${state.delays[0].toFixed(3)} / ${state.delays[1].toFixed(3)}`;
    this.scoreReadout.textContent = String(state.score);
    this.lagBadge.classList.toggle("hidden", !state.lag);
  }

  onStatus(connected: boolean): void {
    this.statusReadout.textContent = connected ? "live" : "disconnected";
    this.statusReadout.classList.toggle("offline", !connected);
  }
}
