/** WebSocket event stream with automatic reconnect and seq resume.
 *
 * On every (re)connect the stream asks the server for events from
 * last_seq + 1, and additionally drops any frame at or below last_seq, so
 * consumers never see a duplicate even when the server replays overlap.
 * Socket construction and timer scheduling are injectable for tests.
 */

import type { SessionEvent } from "./types"

export interface WebSocketLike {
  onopen: ((ev?: unknown) => void) | null
  onmessage: ((ev: { data: string }) => void) | null
  onclose: ((ev?: unknown) => void) | null
  onerror: ((ev?: unknown) => void) | null
  close(): void
}

export interface EventStreamOptions {
  /** Build the stream URL for a given resume point. */
  url: (fromSeq: number) => string
  onEvent: (event: SessionEvent) => void
  onStatus: (status: "connecting" | "live" | "reconnecting") => void
  makeSocket?: (url: string) => WebSocketLike
  schedule?: (fn: () => void, delayMs: number) => void
  /** Reconnect backoff ladder; the last entry repeats. */
  backoffMs?: number[]
}

export const DEFAULT_BACKOFF_MS = [500, 1000, 2000, 5000]

export class EventStream {
  private socket: WebSocketLike | null = null
  private stopped = false
  private attempt = 0
  private lastSeq = -1

  private readonly makeSocket: (url: string) => WebSocketLike
  private readonly schedule: (fn: () => void, delayMs: number) => void
  private readonly backoffMs: number[]

  constructor(private readonly options: EventStreamOptions) {
    this.makeSocket = options.makeSocket ?? ((url) => new WebSocket(url) as WebSocketLike)
    this.schedule = options.schedule ?? ((fn, ms) => setTimeout(fn, ms))
    this.backoffMs = options.backoffMs ?? DEFAULT_BACKOFF_MS
  }

  /** Begin streaming; fromSeq seeds the first request (default 0). */
  start(fromSeq = 0): void {
    this.lastSeq = fromSeq - 1
    this.stopped = false
    this.options.onStatus("connecting")
    this.connect()
  }

  stop(): void {
    this.stopped = true
    this.socket?.close()
    this.socket = null
  }

  get resumeSeq(): number {
    return this.lastSeq + 1
  }

  private connect(): void {
    if (this.stopped) return
    const socket = this.makeSocket(this.options.url(this.lastSeq + 1))
    this.socket = socket

    socket.onopen = () => {
      this.attempt = 0
      this.options.onStatus("live")
    }
    socket.onmessage = (ev) => {
      let event: SessionEvent
      try {
        event = JSON.parse(ev.data) as SessionEvent
      } catch {
        return // malformed frame; the next one may be fine
      }
      if (event.seq <= this.lastSeq) return // duplicate from replay overlap
      this.lastSeq = event.seq
      this.options.onEvent(event)
    }
    socket.onclose = () => {
      if (this.stopped) return
      this.options.onStatus("reconnecting")
      const delay = this.backoffMs[Math.min(this.attempt, this.backoffMs.length - 1)]
      this.attempt += 1
      this.schedule(() => this.connect(), delay)
    }
    socket.onerror = () => {
      // close always follows; reconnect is handled there
    }
  }
}
