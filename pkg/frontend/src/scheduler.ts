/** Debounced latest-wins request scheduling.
 *
 * Any burst of state changes within the debounce window collapses into one
 * request; responses arriving for anything but the newest issued request are
 * discarded, so the shown image always matches the most recent completed
 * request.
 */

export interface SchedulerHooks<S, R> {
  send(state: S, seq: number): Promise<R>
  apply(result: R, state: S, seq: number): void
  onError?(error: unknown, state: S, seq: number): void
  setTimer?(fn: () => void, ms: number): unknown
  clearTimer?(handle: unknown): void
}

export class RenderScheduler<S, R> {
  private debounceMs: number
  private hooks: SchedulerHooks<S, R>
  private pending: S | null = null
  private timer: unknown = null
  private seq = 0
  private applied = 0
  private inFlight = 0

  constructor(debounceMs: number, hooks: SchedulerHooks<S, R>) {
    this.debounceMs = debounceMs
    this.hooks = hooks
  }

  /** Queue a state snapshot; the newest one in the window is sent. */
  request(state: S): void {
    this.pending = state
    const set = this.hooks.setTimer ?? ((fn, ms) => setTimeout(fn, ms))
    const clear = this.hooks.clearTimer ?? ((h) => clearTimeout(h as never))
    if (this.timer !== null) clear(this.timer)
    this.timer = set(() => this.flush(), this.debounceMs)
  }

  /** Send immediately, bypassing the debounce (used for the first render). */
  flush(): void {
    if (this.timer !== null) {
      const clear = this.hooks.clearTimer ?? ((h) => clearTimeout(h as never))
      clear(this.timer)
      this.timer = null
    }
    if (this.pending === null) return
    const state = this.pending
    this.pending = null
    const seq = ++this.seq
    this.inFlight += 1
    this.hooks
      .send(state, seq)
      .then((result) => {
        if (seq > this.applied) {
          this.applied = seq
          this.hooks.apply(result, state, seq)
        }
      })
      .catch((error) => this.hooks.onError?.(error, state, seq))
      .finally(() => {
        this.inFlight -= 1
      })
  }

  get inFlightCount(): number {
    return this.inFlight
  }

  get issuedCount(): number {
    return this.seq
  }
}
