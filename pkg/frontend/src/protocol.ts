// Wire protocol shared with the game service: JSON text frames over a
// single WebSocket.  The client never simulates dynamics; everything it
// renders comes out of `state` messages.

export interface StateMessage {
  type: "state";
  tick: number;
  t: number;
  evader: [number, number];
  pursuer: [number, number];
  cursor: [number, number];
  error: [number, number];
  delays: [number, number];
  disturbance: [number, number];
  captured: boolean;
  score: number;
  lag: boolean;
}

export interface RoundMessage {
  type: "round";
  event: "capture" | "escape";
  score: number;
  t: number;
}

export interface ConfigAckMessage {
  type: "config_ack";
  changed: string;
  delays: [number, number];
  preset: string | null;
  paused: boolean;
}

export interface ErrorMessage {
  type: "error";
  message: string;
}

export type ServerMessage = StateMessage | RoundMessage | ConfigAckMessage | ErrorMessage;

export type PresetName = "off" | "unstable" | "stable" | "critical";

export interface DisturbanceForm {
  kind: "step" | "pulse" | "sine";
  amplitude: number;
  start?: number;
  duration?: number;
  frequency?: number;
  channel: "x" | "y";
}

const isNum = (v: unknown): v is number => typeof v === "number" && Number.isFinite(v);

function isPair(v: unknown): v is [number, number] {
  return Array.isArray(v) && v.length === 2 && isNum(v[0]) && isNum(v[1]);
}

/** Parse and validate one server frame; null for anything malformed. */
export function parseServerMessage(raw: string): ServerMessage | null {
  let msg: any;
  try {
    msg = JSON.parse(raw);
  } catch {
    return null;
  }
  if (typeof msg !== "object" || msg === null) return null;
  switch (msg.type) {
    case "state":
      if (
        isNum(msg.tick) && isNum(msg.t) &&
        isPair(msg.evader) && isPair(msg.pursuer) && isPair(msg.cursor) &&
        isPair(msg.error) && isPair(msg.delays) && isPair(msg.disturbance) &&
        typeof msg.captured === "boolean" && isNum(msg.score) &&
        typeof msg.lag === "boolean"
      ) {
        return msg as StateMessage;
      }
      return null;
    case "round":
      if ((msg.event === "capture" || msg.event === "escape") && isNum(msg.score) && isNum(msg.t)) {
        return msg as RoundMessage;
      }
      return null;
    case "config_ack":
      if (isPair(msg.delays) && typeof msg.changed === "string" && typeof msg.paused === "boolean") {
        return msg as ConfigAckMessage;
      }
      return null;
    case "error":
      if (typeof msg.message === "string") return msg as ErrorMessage;
      return null;
    default:
      return null;
  }
}

export const cursorMessage = (x: number, y: number) =>
  JSON.stringify({ type: "cursor", x, y });

export const presetMessage = (value: PresetName) =>
  JSON.stringify({ type: "preset", value });

export const setDelaysMessage = (tau1: number, tau2: number) =>
  JSON.stringify({ type: "set_delays", tau1, tau2 });

export const disturbanceMessage = (form: DisturbanceForm) =>
  JSON.stringify({ type: "disturbance", ...form });

export const resetMessage = () => JSON.stringify({ type: "reset" });

export const pauseMessage = () => JSON.stringify({ type: "pause" });

export const clamp01 = (v: number) => Math.min(1, Math.max(0, v));
