/** Canvas scroll view: viewport fetching and autoscroll easing.
 *
 * Rendering never blocks on synthesis: the view draws whatever viewport
 * image it last fetched, refreshes when the scroll grows or the offset
 * moves, and keeps the stale image when a fetch fails mid-stream.
 */

import { clampOffset, type ViewState } from "./store"

/** Advance an offset toward a target at a capped speed; never overshoots. */
export function easeOffset(
  currentPx: number,
  targetPx: number,
  dtMs: number,
  pxPerSecond: number,
): number {
  const maxStep = (pxPerSecond * dtMs) / 1000
  const delta = targetPx - currentPx
  if (Math.abs(delta) <= maxStep) return targetPx
  return currentPx + Math.sign(delta) * maxStep
}

/** Autoscroll target: the newest edge of the scroll. */
export function newestEdgeOffset(totalWidth: number, viewportWidth: number): number {
  return Math.max(0, totalWidth - viewportWidth)
}

export interface LoadedImage {
  source: unknown
  width: number
  height: number
}

export interface DrawTarget {
  readonly width: number
  readonly height: number
  drawImage(image: LoadedImage, dx: number, dy: number, dw: number, dh: number): void
  clear(): void
}

export type ImageLoader = (url: string) => Promise<LoadedImage>

export interface ScrollViewOptions {
  viewportUrl: (offsetPx: number, widthPx: number) => string
  target: DrawTarget
  loadImage: ImageLoader
  /** Autoscroll speed; the exhibition default is gentle. */
  pxPerSecond?: number
}

export class ScrollView {
  offsetPx = 0
  private drawnUrl: string | null = null
  private image: LoadedImage | null = null
  private fetching = false
  private readonly pxPerSecond: number

  constructor(private readonly options: ScrollViewOptions) {
    this.pxPerSecond = options.pxPerSecond ?? 40
  }

  /** Advance autoscroll by dt and report whether the offset moved. */
  advance(state: ViewState, dtMs: number): boolean {
    const width = this.options.target.width
    let next = this.offsetPx
    if (state.autoscroll) {
      next = easeOffset(next, newestEdgeOffset(state.totalWidth, width), dtMs, this.pxPerSecond)
    }
    next = clampOffset(next, Math.max(state.totalWidth, width), width)
    const moved = next !== this.offsetPx
    this.offsetPx = next
    return moved
  }

  /** Viewport request for the current offset; width capped to the scroll. */
  viewportRequest(state: ViewState): { offset: number; width: number } {
    const paneWidth = this.options.target.width
    const available = Math.max(state.totalWidth, 1)
    const width = Math.min(paneWidth, available)
    const offset = clampOffset(this.offsetPx, available, width)
    return { offset, width }
  }

  /** Fetch and draw the viewport; the stale image is kept on failure. */
  async refresh(state: ViewState): Promise<boolean> {
    const { offset, width } = this.viewportRequest(state)
    const url = this.options.viewportUrl(offset, width)
    if (url === this.drawnUrl || this.fetching) return false
    this.fetching = true
    try {
      this.image = await this.options.loadImage(url)
      this.drawnUrl = url
    } catch {
      return false // keep showing the previous viewport
    } finally {
      this.fetching = false
    }
    this.draw()
    return true
  }

  private draw(): void {
    const target = this.options.target
    const image = this.image
    if (image === null) return
    target.clear()
    const scale = target.height / Math.max(1, image.height)
    target.drawImage(image, 0, 0, image.width * scale, target.height)
  }
}
