import type { RenderRequest, SchemaField, StyleReport, Timings, Violation } from './types.js'

export class ServiceError extends Error {
  violations: Violation[]
  status: number

  constructor(status: number, message: string, violations: Violation[] = []) {
    super(message)
    this.status = status
    this.violations = violations
  }
}

async function raiseFor(response: Response): Promise<never> {
  let message = `${response.status} ${response.statusText}`
  let violations: Violation[] = []
  try {
    const body = await response.json()
    const detail = body.detail ?? body
    if (typeof detail === 'string') message = detail
    else {
      message = detail.message ?? message
      violations = detail.violations ?? []
    }
  } catch {
    /* non-JSON error body */
  }
  throw new ServiceError(response.status, message, violations)
}

export class ApiClient {
  base: string
  fetcher: typeof fetch

  constructor(base = '', fetcher: typeof fetch = fetch.bind(globalThis)) {
    this.base = base
    this.fetcher = fetcher
  }

  async schema(): Promise<SchemaField[]> {
    const r = await this.fetcher(`${this.base}/api/params/schema`)
    if (!r.ok) await raiseFor(r)
    return (await r.json()).fields
  }

  async meshes(): Promise<string[]> {
    const r = await this.fetcher(`${this.base}/api/meshes`)
    if (!r.ok) await raiseFor(r)
    return (await r.json()).meshes
  }

  async render(req: RenderRequest): Promise<{ blob: Blob; millis: number }> {
    const r = await this.fetcher(`${this.base}/api/render`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(req),
    })
    if (!r.ok) await raiseFor(r)
    const millis = Number(r.headers.get('X-Render-Millis') ?? 'NaN')
    return { blob: await r.blob(), millis }
  }

  async metrics(req: RenderRequest): Promise<StyleReport> {
    const r = await this.fetcher(`${this.base}/api/metrics`, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(req),
    })
    if (!r.ok) await raiseFor(r)
    return r.json()
  }

  async lastTimings(): Promise<Timings> {
    const r = await this.fetcher(`${this.base}/api/last-timings`)
    if (!r.ok) await raiseFor(r)
    return r.json()
  }
}
