/** Browser entry point: wires capture, stream, store, and two scroll panes.
 *
 * Pane one follows the newest edge (the exhibition's "live" screen); pane
 * two browses freely with autoscroll off, approximating the multi-screen
 * setup in a single page.
 */

import { ApiClient } from "./api"
import { EventStream } from "./events"
import { browserRecognitionFactory, SpeechCapture } from "./speech"
import { ScrollView, type DrawTarget, type LoadedImage } from "./scrollview"
import {
  applyEvent,
  initialState,
  setConnection,
  setNotice,
  type ViewState,
} from "./store"

const FRAME_MS = 100
const REFRESH_MS = 500

function canvasTarget(canvas: HTMLCanvasElement): DrawTarget {
  const ctx = canvas.getContext("2d")
  if (!ctx) throw new Error("2d canvas context unavailable")
  return {
    get width() {
      return canvas.width
    },
    get height() {
      return canvas.height
    },
    drawImage(image: LoadedImage, dx, dy, dw, dh) {
      ctx.drawImage(image.source as CanvasImageSource, dx, dy, dw, dh)
    },
    clear() {
      ctx.clearRect(0, 0, canvas.width, canvas.height)
    },
  }
}

function loadImage(url: string): Promise<LoadedImage> {
  return new Promise((resolve, reject) => {
    const img = new Image()
    img.onload = () =>
      resolve({ source: img, width: img.naturalWidth, height: img.naturalHeight })
    img.onerror = () => reject(new Error(`failed to load ${url}`))
    img.src = url
  })
}

function element<T extends HTMLElement>(id: string): T {
  const found = document.getElementById(id)
  if (!found) throw new Error(`missing #${id}`)
  return found as T
}

async function boot(): Promise<void> {
  const api = new ApiClient(location.origin)
  const sessionId = await api.createSession()
  let state: ViewState = initialState(sessionId)

  const statusBadge = element<HTMLSpanElement>("status")
  const configBadge = element<HTMLSpanElement>("config")
  const noticeLine = element<HTMLParagraphElement>("notice")
  const pendingLine = element<HTMLParagraphElement>("pending")
  const interimLine = element<HTMLParagraphElement>("interim")
  const input = element<HTMLInputElement>("utterance")
  const micButton = element<HTMLButtonElement>("mic")
  const form = element<HTMLFormElement>("capture")

  const panes = [
    new ScrollView({
      viewportUrl: (o, w) => api.viewportUrl(sessionId, o, w),
      target: canvasTarget(element<HTMLCanvasElement>("pane-live")),
      loadImage,
    }),
    new ScrollView({
      viewportUrl: (o, w) => api.viewportUrl(sessionId, o, w),
      target: canvasTarget(element<HTMLCanvasElement>("pane-browse")),
      loadImage,
      pxPerSecond: 0,
    }),
  ]

  function render(): void {
    statusBadge.textContent = state.connection
    statusBadge.dataset.state = state.connection
    configBadge.textContent = state.configHash ? `config ${state.configHash}` : ""
    noticeLine.textContent = state.notice ?? state.lastError ?? ""
    pendingLine.textContent = state.pending.length
      ? `rendering ${state.pending.length} utterance(s)…`
      : ""
  }

  function update(next: ViewState): void {
    if (next !== state) {
      state = next
      render()
    }
  }

  const stream = new EventStream({
    url: (fromSeq) => api.streamUrl(sessionId, fromSeq),
    onEvent: (event) => update(applyEvent(state, event)),
    onStatus: (status) => update(setConnection(state, status)),
  })
  stream.start(0)

  const capture = new SpeechCapture(browserRecognitionFactory, {
    onInterim: (text) => {
      interimLine.textContent = text
    },
    onFinal: (text) => {
      interimLine.textContent = ""
      void api.submitUtterance(sessionId, text).catch((error: Error) => {
        update(setNotice(state, error.message))
      })
    },
    onModeChange: (mode, notice) => {
      micButton.disabled = mode === "typed"
      update(setNotice(state, notice))
    },
  })
  capture.enableSpeech()
  micButton.addEventListener("click", () => capture.startListening())
  form.addEventListener("submit", (ev) => {
    ev.preventDefault()
    capture.submitTyped(input.value)
    input.value = ""
  })

  let lastTick = performance.now()
  setInterval(() => {
    const now = performance.now()
    const dt = now - lastTick
    lastTick = now
    for (const pane of panes) pane.advance(state, dt)
  }, FRAME_MS)
  setInterval(() => {
    for (const pane of panes) void pane.refresh(state)
  }, REFRESH_MS)

  render()
}

void boot().catch((error: Error) => {
  document.body.textContent = `failed to start: ${error.message}`
})
