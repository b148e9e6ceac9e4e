// @vitest-environment jsdom
import { beforeEach, describe, expect, it, vi } from "vitest";

import { SocketClient } from "../src/net.js";
import { ControlPanel } from "../src/panel.js";

function makePanel() {
  const sent: string[] = [];
  const socket = {
    sendPreset: vi.fn(() => true),
    sendDelays: vi.fn(() => true),
    sendDisturbance: vi.fn(() => true),
    sendReset: vi.fn(() => true),
    sendPause: vi.fn(() => true),
  } as unknown as SocketClient;
  const panel = new ControlPanel(socket);
  document.body.appendChild(panel.root);
  return { panel, socket: socket as any, sent };
}

function setInput(panel: ControlPanel, selector: string, value: string) {
  (panel.root.querySelector(selector) as HTMLInputElement).value = value;
}

describe("ControlPanel", () => {
  beforeEach(() => {
    document.body.innerHTML = "";
  });

  it("preset buttons emit the preset message", () => {
    const { panel, socket } = makePanel();
    const buttons = panel.root.querySelectorAll("#preset-buttons button");
    expect(buttons.length).toBe(4);
    (buttons[2] as HTMLButtonElement).click(); // Stable (0.8)
    expect(socket.sendPreset).toHaveBeenCalledWith("stable");
  });

  it("negative manual delay shows an inline error and sends nothing", () => {
    const { panel, socket } = makePanel();
    setInput(panel, "#tau1-input", "-1");
    setInput(panel, "#tau2-input", "0.5");
    (panel.root.querySelector("#apply-delays") as HTMLButtonElement).click();
    const err = panel.root.querySelector("#manual-error") as HTMLElement;
    expect(err.classList.contains("hidden")).toBe(false);
    expect(err.textContent).toMatch(/>= 0/);
    expect(socket.sendDelays).not.toHaveBeenCalled();
  });

  it("valid manual delays are sent and the error clears", () => {
    const { panel, socket } = makePanel();
    setInput(panel, "#tau1-input", "0.3");
    setInput(panel, "#tau2-input", "0.9");
    (panel.root.querySelector("#apply-delays") as HTMLButtonElement).click();
    expect(socket.sendDelays).toHaveBeenCalledWith(0.3, 0.9);
    const err = panel.root.querySelector("#manual-error") as HTMLElement;
    expect(err.classList.contains("hidden")).toBe(true);
  });

  it("reflects config_ack in the readout and active preset", () => {
    const { panel } = makePanel();
    panel.onAck({
      type: "config_ack", changed: "preset",
      delays: [0.8, 0.8], preset: "stable", paused: false,
    });
    const readout = panel.root.querySelector("#delay-readout") as HTMLElement;
    expect(readout.textContent).toBe("0.800 / 0.800");
    const active = panel.root.querySelectorAll("#preset-buttons button.active");
    expect(active.length).toBe(1);
    expect(active[0].textContent).toContain("Stable");
  });

  it("disturbance form validates pulse duration", () => {
    const { panel, socket } = makePanel();
    (panel.root.querySelector("#dist-kind") as HTMLSelectElement).value = "pulse";
    setInput(panel, "#dist-dur", "0");
    (panel.root.querySelector("#dist-apply") as HTMLButtonElement).click();
    expect(socket.sendDisturbance).not.toHaveBeenCalled();
    setInput(panel, "#dist-dur", "2");
    (panel.root.querySelector("#dist-apply") as HTMLButtonElement).click();
    expect(socket.sendDisturbance).toHaveBeenCalledWith({
      kind: "pulse", amplitude: 1, channel: "x", duration: 2,
    });
  });

  it("state updates drive score and lag badge", () => {
    const { panel } = makePanel();
    panel.onState({
      type: "state", tick: 5, t: 0.05, evader: [0, 0], pursuer: [0, 0],
      cursor: [0, 0], error: [0, 0], delays: [0.6, 0.6], disturbance: [0, 0],
      captured: false, score: 3, lag: true,
    });
    expect((panel.root.querySelector("#score-readout") as HTMLElement).textContent).toBe("3");
    expect((panel.root.querySelector("#lag-badge") as HTMLElement).classList.contains("hidden")).toBe(false);
  });
});
