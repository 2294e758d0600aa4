/** View state and the event reducer.
 *
 * The reducer is the single place server events enter the UI.  It is strict
 * about ordering: an event whose seq is not greater than last_seq is
 * ignored (same state object returned), which makes replay — after a
 * reconnect resume or a flaky stream — idempotent by construction.
 */

import type {
  ConfigChangedPayload,
  PanelFailedPayload,
  PanelReadyPayload,
  SessionEvent,
  UtteranceReceivedPayload,
} from "./types"

export type Connection = "connecting" | "live" | "reconnecting"

export interface PanelInfo {
  index: number
  utteranceId: string
  seedUsed: number
  backendId: string
  durationMs: number
  regenerated: boolean
}

export interface ViewState {
  sessionId: string
  connection: Connection
  scrollOffsetPx: number
  autoscroll: boolean
  /** Highest applied event seq; -1 before the first event. */
  lastSeq: number
  totalWidth: number
  panels: PanelInfo[]
  /** Utterance ids acknowledged by the engine but not yet rendered. */
  pending: string[]
  configHash: string | null
  lastError: string | null
  notice: string | null
}

export function initialState(sessionId: string): ViewState {
  return {
    sessionId,
    connection: "connecting",
    scrollOffsetPx: 0,
    autoscroll: true,
    lastSeq: -1,
    totalWidth: 0,
    panels: [],
    pending: [],
    configHash: null,
    lastError: null,
    notice: null,
  }
}

/** Clamp a scroll offset into [0, total_width - viewport_width]. */
export function clampOffset(offsetPx: number, totalWidth: number, viewportWidth: number): number {
  const max = Math.max(0, totalWidth - viewportWidth)
  return Math.min(Math.max(0, offsetPx), max)
}

function upsertPanel(panels: PanelInfo[], panel: PanelInfo): PanelInfo[] {
  const next = panels.filter((p) => p.index !== panel.index)
  next.push(panel)
  next.sort((a, b) => a.index - b.index)
  return next
}

/** Apply one server event; returns the same object when the event is stale. */
export function applyEvent(state: ViewState, event: SessionEvent): ViewState {
  if (event.seq <= state.lastSeq) return state

  const next: ViewState = { ...state, lastSeq: event.seq }
  switch (event.kind) {
    case "utterance_received": {
      const payload = event.payload as unknown as UtteranceReceivedPayload
      if (!next.pending.includes(payload.utterance_id)) {
        next.pending = [...next.pending, payload.utterance_id]
      }
      break
    }
    case "features_ready":
      break // informational; panel_ready carries everything the UI draws
    case "panel_ready": {
      const payload = event.payload as unknown as PanelReadyPayload
      next.pending = next.pending.filter((id) => id !== payload.utterance_id)
      next.panels = upsertPanel(next.panels, {
        index: payload.panel_index,
        utteranceId: payload.utterance_id,
        seedUsed: payload.seed_used,
        backendId: payload.backend_id,
        durationMs: payload.duration_ms,
        regenerated: payload.regenerated,
      })
      next.totalWidth = payload.total_width
      break
    }
    case "panel_failed": {
      const payload = event.payload as unknown as PanelFailedPayload
      next.pending = next.pending.filter((id) => id !== payload.utterance_id)
      next.lastError = `${payload.error}: ${payload.message}`
      break
    }
    case "config_changed": {
      const payload = event.payload as unknown as ConfigChangedPayload
      next.configHash = payload.config_hash
      break
    }
  }
  return next
}

export function setConnection(state: ViewState, connection: Connection): ViewState {
  if (state.connection === connection) return state
  return { ...state, connection }
}

export function setNotice(state: ViewState, notice: string | null): ViewState {
  return { ...state, notice }
}

export function setAutoscroll(state: ViewState, autoscroll: boolean): ViewState {
  return { ...state, autoscroll }
}

export function setScrollOffset(state: ViewState, offsetPx: number, viewportWidth: number): ViewState {
  return { ...state, scrollOffsetPx: clampOffset(offsetPx, state.totalWidth, viewportWidth) }
}
