import type { ProgressEvent } from "./types.js";

// Minimal slice of the WebSocket surface the feed needs; tests substitute a
// scripted fake.
export interface SocketLike {
  onmessage: ((event: { data: string }) => void) | null;
  onclose: (() => void) | null;
  onerror: (() => void) | null;
  close(): void;
}

export type SocketFactory = (url: string) => SocketLike;

export class EventFeed {
  private socket: SocketLike | null = null;

  constructor(
    private factory: SocketFactory,
    private base: string = "",
  ) {}

  connect(sessionId: string, onEvent: (event: ProgressEvent) => void): void {
    this.disconnect();
    const scheme = this.base.startsWith("https") ? "wss" : "ws";
    const host = this.base.replace(/^https?:\/\//, "");
    const url = host
      ? `${scheme}://${host}/sessions/${sessionId}/events`
      : `/sessions/${sessionId}/events`;
    this.socket = this.factory(url);
    this.socket.onmessage = (event) => {
      try {
        onEvent(JSON.parse(event.data) as ProgressEvent);
      } catch {
        // ignore malformed frames
      }
    };
    this.socket.onclose = () => {
      this.socket = null;
    };
    this.socket.onerror = () => {
      this.socket = null;
    };
  }

  disconnect(): void {
    if (this.socket) {
      const socket = this.socket;
      this.socket = null;
      socket.close();
    }
  }
}

export function browserSocketFactory(url: string): SocketLike {
  const full = url.startsWith("ws")
    ? url
    : `${location.protocol === "https:" ? "wss" : "ws"}://${location.host}${url}`;
  return new WebSocket(full) as unknown as SocketLike;
}

export class NullFeed extends EventFeed {
  constructor() {
    super(() => ({ onmessage: null, onclose: null, onerror: null, close() {} }));
  }
  override connect(): void {}
}
