// WebSocket client wrapper: message dispatch, reconnection, and the cursor
// send path with its rate limit.

import {
  ConfigAckMessage,
  DisturbanceForm,
  ErrorMessage,
  PresetName,
  RoundMessage,
  StateMessage,
  clamp01,
  cursorMessage,
  disturbanceMessage,
  parseServerMessage,
  pauseMessage,
  presetMessage,
  resetMessage,
  setDelaysMessage,
} from "./protocol.js";

export interface WebSocketLike {
  readyState: number;
  send(data: string): void;
  close(): void;
  onopen: ((ev?: unknown) => void) | null;
  onclose: ((ev?: unknown) => void) | null;
  onmessage: ((ev: { data: unknown }) => void) | null;
  onerror: ((ev?: unknown) => void) | null;
}

export type WsFactory = (url: string) => WebSocketLike;

export interface SocketHandlers {
  onState?: (msg: StateMessage) => void;
  onRound?: (msg: RoundMessage) => void;
  onAck?: (msg: ConfigAckMessage) => void;
  onServerError?: (msg: ErrorMessage) => void;
  onStatus?: (connected: boolean) => void;
}

const OPEN = 1;
export const MAX_CURSOR_HZ = 120;

export class SocketClient {
  private ws: WebSocketLike | null = null;
  private lastCursorSent = -Infinity;
  private pendingCursor: [number, number] | null = null;
  private cursorTimer: ReturnType<typeof setTimeout> | null = null;
  /** latest cursor queued while disconnected; capacity one, latest wins */
  private queuedWhileClosed: [number, number] | null = null;
  private reconnectDelayMs = 1000;
  private closedByUser = false;

  constructor(
    private url: string,
    private handlers: SocketHandlers = {},
    private wsFactory: WsFactory = (u) => new WebSocket(u) as unknown as WebSocketLike,
    private now: () => number = () => performance.now(),
  ) {}

  connect(): void {
    this.closedByUser = false;
    const ws = this.wsFactory(this.url);
    this.ws = ws;
    ws.onopen = () => {
      this.handlers.onStatus?.(true);
      if (this.queuedWhileClosed) {
        const [x, y] = this.queuedWhileClosed;
        this.queuedWhileClosed = null;
        this.sendCursor(x, y);
      }
    };
    ws.onclose = () => {
      this.handlers.onStatus?.(false);
      this.ws = null;
      if (!this.closedByUser) {
        setTimeout(() => this.connect(), this.reconnectDelayMs);
      }
    };
    ws.onerror = () => {
      // onclose follows; nothing else to do
    };
    ws.onmessage = (ev) => {
      const msg = parseServerMessage(String(ev.data));
      if (!msg) return;
      switch (msg.type) {
        case "state":
          this.handlers.onState?.(msg);
          break;
        case "round":
          this.handlers.onRound?.(msg);
          break;
        case "config_ack":
          this.handlers.onAck?.(msg);
          break;
        case "error":
          this.handlers.onServerError?.(msg);
          break;
      }
    };
  }

  close(): void {
    this.closedByUser = true;
    this.ws?.close();
    this.ws = null;
  }

  get connected(): boolean {
    return this.ws !== null && this.ws.readyState === OPEN;
  }

  private rawSend(data: string): boolean {
    if (this.connected) {
      this.ws!.send(data);
      return true;
    }
    return false;
  }

  /**
   * Send a cursor position in field coordinates, clamped to the unit square
   * and throttled to MAX_CURSOR_HZ messages per second (latest position wins
   * while waiting).  While disconnected the newest position is held back and
   * flushed on reconnect.
   */
  sendCursor(x: number, y: number): void {
    x = clamp01(x);
    y = clamp01(y);
    if (!this.connected) {
      this.queuedWhileClosed = [x, y];
      return;
    }
    // ceil keeps any one-second window at or below the cap (a gap of
    // exactly 1000/120 ms puts 121 fenceposts into a closed window)
    const minGap = Math.ceil(1000 / MAX_CURSOR_HZ);
    const elapsed = this.now() - this.lastCursorSent;
    if (elapsed >= minGap) {
      this.lastCursorSent = this.now();
      this.rawSend(cursorMessage(x, y));
      return;
    }
    this.pendingCursor = [x, y];
    if (this.cursorTimer === null) {
      this.cursorTimer = setTimeout(() => {
        this.cursorTimer = null;
        const pending = this.pendingCursor;
        this.pendingCursor = null;
        if (pending && this.connected) {
          this.lastCursorSent = this.now();
          this.rawSend(cursorMessage(pending[0], pending[1]));
        }
      }, minGap - elapsed);
    }
  }

  sendPreset(value: PresetName): boolean {
    return this.rawSend(presetMessage(value));
  }

  sendDelays(tau1: number, tau2: number): boolean {
    return this.rawSend(setDelaysMessage(tau1, tau2));
  }

  sendDisturbance(form: DisturbanceForm): boolean {
    return this.rawSend(disturbanceMessage(form));
  }

  sendReset(): boolean {
    return this.rawSend(resetMessage());
  }

  sendPause(): boolean {
    return this.rawSend(pauseMessage());
  }
}
