/** Thin typed client for the session-service HTTP API.
 *
 * The fetch implementation is injectable so the client is testable without
 * a browser or a running server.
 */

import type { SessionEvent } from "./types"

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`api error ${status}: ${detail}`)
    this.name = "ApiError"
  }
}

async function parseJson(response: Response): Promise<Record<string, unknown>> {
  if (!response.ok) {
    let detail = response.statusText
    try {
      const body = (await response.json()) as { detail?: string }
      if (typeof body.detail === "string") detail = body.detail
    } catch {
      // non-JSON error body; keep the status text
    }
    throw new ApiError(response.status, detail)
  }
  return (await response.json()) as Record<string, unknown>
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async post(path: string, body?: unknown): Promise<Record<string, unknown>> {
    return parseJson(
      await this.fetchFn(this.baseUrl + path, {
        method: "POST",
        headers: { "content-type": "application/json" },
        body: body === undefined ? undefined : JSON.stringify(body),
      }),
    )
  }

  async createSession(): Promise<string> {
    const body = await this.post("/v1/sessions")
    return body.session_id as string
  }

  async submitUtterance(sessionId: string, text: string): Promise<string> {
    const body = await this.post(`/v1/sessions/${sessionId}/utterances`, { text })
    return body.utterance_id as string
  }

  async regeneratePanel(sessionId: string, panelIndex: number, seed?: number): Promise<number> {
    const body = await this.post(
      `/v1/sessions/${sessionId}/panels/${panelIndex}/regenerate`,
      seed === undefined ? {} : { seed },
    )
    return body.seed as number
  }

  async setCurated(sessionId: string, panelIndex: number, curated: boolean): Promise<number> {
    const response = await this.fetchFn(
      `${this.baseUrl}/v1/sessions/${sessionId}/panels/${panelIndex}/curated`,
      {
        method: "PUT",
        headers: { "content-type": "application/json" },
        body: JSON.stringify({ curated }),
      },
    )
    const body = await parseJson(response)
    return body.total_width as number
  }

  async getEvents(sessionId: string, fromSeq = 0): Promise<SessionEvent[]> {
    const response = await this.fetchFn(
      `${this.baseUrl}/v1/sessions/${sessionId}/events?from_seq=${fromSeq}`,
    )
    const body = await parseJson(response)
    return body.events as unknown as SessionEvent[]
  }

  async getConfig(): Promise<Record<string, unknown>> {
    return parseJson(await this.fetchFn(`${this.baseUrl}/v1/config`))
  }

  async putConfig(config: Record<string, unknown>): Promise<Record<string, unknown>> {
    return parseJson(
      await this.fetchFn(`${this.baseUrl}/v1/config`, {
        method: "PUT",
        headers: { "content-type": "application/json" },
        body: JSON.stringify(config),
      }),
    )
  }

  /** URL of a viewport PNG; callers load it as an image element. */
  viewportUrl(sessionId: string, offsetPx: number, widthPx: number): string {
    return `${this.baseUrl}/v1/sessions/${sessionId}/scroll?offset=${offsetPx}&width=${widthPx}`
  }

  panelImageUrl(sessionId: string, panelIndex: number, kind: "result" | "base" = "result"): string {
    return `${this.baseUrl}/v1/sessions/${sessionId}/panels/${panelIndex}/image?kind=${kind}`
  }

  /** ws:// or wss:// endpoint for the event stream. */
  streamUrl(sessionId: string, fromSeq: number): string {
    const ws = this.baseUrl.replace(/^http/, "ws")
    return `${ws}/v1/sessions/${sessionId}/stream?from_seq=${fromSeq}`
  }
}
