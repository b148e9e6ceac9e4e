import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { MAX_CURSOR_HZ, SocketClient, WebSocketLike } from "../src/net.js";

class FakeWebSocket implements WebSocketLike {
  readyState = 0;
  sent: string[] = [];
  onopen: ((ev?: unknown) => void) | null = null;
  onclose: ((ev?: unknown) => void) | null = null;
  onmessage: ((ev: { data: unknown }) => void) | null = null;
  onerror: ((ev?: unknown) => void) | null = null;

  open() {
    this.readyState = 1;
    this.onopen?.();
  }

  send(data: string) {
    if (this.readyState !== 1) throw new Error("not open");
    this.sent.push(data);
  }

  close() {
    this.readyState = 3;
    this.onclose?.();
  }

  receive(data: string) {
    this.onmessage?.({ data });
  }
}

describe("SocketClient cursor throttle", () => {
  let fake: FakeWebSocket;
  let client: SocketClient;

  beforeEach(() => {
    vi.useFakeTimers();
    fake = new FakeWebSocket();
    client = new SocketClient(
      "ws://test/ws", {}, () => fake, () => Date.now(),
    );
    client.connect();
    fake.open();
  });

  afterEach(() => {
    vi.useRealTimers();
  });

  it("limits a 1000-event burst to at most 120 messages per second", () => {
    for (let i = 0; i < 1000; i++) {
      client.sendCursor(i / 1000, 0.5);
      vi.advanceTimersByTime(1); // 1000 events over one second
    }
    expect(fake.sent.length).toBeLessThanOrEqual(MAX_CURSOR_HZ);
    expect(fake.sent.length).toBeGreaterThan(100); // but close to the cap
  });

  it("the trailing send carries the latest position", () => {
    client.sendCursor(0.1, 0.1); // sent immediately
    client.sendCursor(0.2, 0.2); // queued
    client.sendCursor(0.3, 0.3); // replaces the queued one
    vi.advanceTimersByTime(20);
    expect(fake.sent.length).toBe(2);
    expect(JSON.parse(fake.sent[1])).toEqual({ type: "cursor", x: 0.3, y: 0.3 });
  });

  it("clamps cursor coordinates to the unit square", () => {
    client.sendCursor(1.8, -0.4);
    expect(JSON.parse(fake.sent[0])).toEqual({ type: "cursor", x: 1, y: 0 });
  });

  it("queues at most one cursor while closed, latest wins, flushed on open", () => {
    const closed = new FakeWebSocket();
    const c2 = new SocketClient("ws://test/ws", {}, () => closed, () => Date.now());
    c2.connect(); // socket exists but never opened
    c2.sendCursor(0.1, 0.1);
    c2.sendCursor(0.9, 0.6);
    expect(closed.sent.length).toBe(0);
    closed.open();
    expect(closed.sent.length).toBe(1);
    expect(JSON.parse(closed.sent[0])).toEqual({ type: "cursor", x: 0.9, y: 0.6 });
  });

  it("control messages pass through unthrottled", () => {
    expect(client.sendPreset("critical")).toBe(true);
    expect(client.sendDelays(0.2, 0.4)).toBe(true);
    expect(client.sendReset()).toBe(true);
    expect(fake.sent.length).toBe(3);
  });
});

describe("SocketClient dispatch", () => {
  it("routes parsed messages to their handlers and drops junk", () => {
    const fake = new FakeWebSocket();
    const seen: string[] = [];
    const client = new SocketClient(
      "ws://test/ws",
      {
        onState: () => seen.push("state"),
        onAck: () => seen.push("ack"),
        onRound: () => seen.push("round"),
        onServerError: () => seen.push("error"),
        onStatus: (up) => seen.push(`status:${up}`),
      },
      () => fake,
    );
    client.connect();
    fake.open();
    fake.receive(JSON.stringify({
      type: "state", tick: 1, t: 0.01, evader: [0, 0], pursuer: [0, 0],
      cursor: [0, 0], error: [0, 0], delays: [0, 0], disturbance: [0, 0],
      captured: false, score: 0, lag: false,
    }));
    fake.receive('{"type":"config_ack","changed":"preset","delays":[0.8,0.8],"preset":"stable","paused":false}');
    fake.receive('{"type":"round","event":"escape","score":0,"t":3}');
    fake.receive('{"type":"error","message":"x"}');
    fake.receive("junk}{");
    expect(seen).toEqual(["status:true", "state", "ack", "round", "error"]);
  });
});
