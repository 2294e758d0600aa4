/** Utterance capture: browser speech recognition with a typed fallback.
 *
 * The recognition object is created by an injected factory.  When the
 * factory yields nothing (unsupported browser) or recognition reports a
 * permission error, capture drops to typed mode with a visible notice and
 * never throws — the installation must keep accepting input.
 */

export type CaptureMode = "speech" | "typed"

export interface RecognitionLike {
  continuous: boolean
  interimResults: boolean
  lang: string
  onresult: ((ev: RecognitionResultEvent) => void) | null
  onerror: ((ev: { error: string }) => void) | null
  onend: (() => void) | null
  start(): void
  stop(): void
}

export interface RecognitionResultEvent {
  resultIndex: number
  results: Array<{ isFinal: boolean; 0: { transcript: string } }>
}

export interface CaptureCallbacks {
  /** Partial recognition text, for live display. */
  onInterim: (text: string) => void
  /** Completed utterance ready to submit. */
  onFinal: (text: string) => void
  /** Mode switches, with a user-facing notice when the switch is forced. */
  onModeChange: (mode: CaptureMode, notice: string | null) => void
}

const PERMISSION_ERRORS = new Set(["not-allowed", "service-not-allowed", "audio-capture"])

/** Feature-detect the standard browser speech recognition constructor. */
export function browserRecognitionFactory(): RecognitionLike | null {
  const w = globalThis as Record<string, unknown>
  const ctor = (w.SpeechRecognition ?? w.webkitSpeechRecognition) as
    | (new () => RecognitionLike)
    | undefined
  if (!ctor) return null
  const recognition = new ctor()
  recognition.continuous = false
  recognition.interimResults = true
  recognition.lang = "en-US"
  return recognition
}

export class SpeechCapture {
  private recognition: RecognitionLike | null = null
  private currentMode: CaptureMode = "typed"
  private listening = false

  constructor(
    private readonly factory: () => RecognitionLike | null,
    private readonly callbacks: CaptureCallbacks,
  ) {}

  get mode(): CaptureMode {
    return this.currentMode
  }

  /** Try to enter speech mode; falls back to typed when unsupported. */
  enableSpeech(): void {
    const recognition = this.factory()
    if (!recognition) {
      this.fallback("speech recognition unavailable; type your utterance instead")
      return
    }
    this.recognition = recognition
    this.currentMode = "speech"
    this.callbacks.onModeChange("speech", null)

    recognition.onresult = (ev) => {
      const interim: string[] = []
      for (let i = ev.resultIndex; i < ev.results.length; i++) {
        const result = ev.results[i]
        const text = result[0].transcript.trim()
        if (result.isFinal && text) {
          this.callbacks.onFinal(text)
        } else if (text) {
          interim.push(text)
        }
      }
      if (interim.length) this.callbacks.onInterim(interim.join(" "))
    }
    recognition.onerror = (ev) => {
      if (PERMISSION_ERRORS.has(ev.error)) {
        this.fallback("microphone unavailable; type your utterance instead")
      }
      // other errors (no-speech, aborted) end the attempt; onend restarts
    }
    recognition.onend = () => {
      if (this.currentMode === "speech" && this.listening) {
        recognition.start() // keep the installation listening
      }
    }
  }

  startListening(): void {
    if (this.currentMode !== "speech" || !this.recognition) return
    this.listening = true
    this.recognition.start()
  }

  stopListening(): void {
    this.listening = false
    this.recognition?.stop()
  }

  /** Typed input path; always available in either mode. */
  submitTyped(text: string): void {
    const trimmed = text.trim()
    if (trimmed) this.callbacks.onFinal(trimmed)
  }

  private fallback(notice: string): void {
    this.listening = false
    this.recognition?.stop()
    this.recognition = null
    this.currentMode = "typed"
    this.callbacks.onModeChange("typed", notice)
  }
}
