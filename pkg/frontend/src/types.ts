/** Wire types for the session-service HTTP/WebSocket API. */

export type EventKind =
  | "utterance_received"
  | "features_ready"
  | "panel_ready"
  | "panel_failed"
  | "config_changed"

export interface SessionEvent {
  seq: number
  kind: EventKind
  payload: Record<string, unknown>
  at: number
}

export interface PromptPayload {
  positive: string
  negative: string
  strength: number
  steps: number
  seed: number
}

export interface PanelReadyPayload {
  utterance_id: string
  panel_index: number
  result_path: string
  base_path: string
  prompt: PromptPayload
  seed_used: number
  backend_id: string
  duration_ms: number
  total_width: number
  regenerated: boolean
}

export interface PanelFailedPayload {
  utterance_id: string
  error: string
  message: string
}

export interface UtteranceReceivedPayload {
  utterance_id: string
  text: string
}

export interface ConfigChangedPayload {
  config_hash: string
}
