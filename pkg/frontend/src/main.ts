import { ApiClient, ServiceError } from './api.js'
import { buildControlPanel, type ControlPanel } from './controls.js'
import { LINE_BAND, LIT_BAND, drawHistogram } from './histogram.js'
import { DEFAULT_ORBIT, orbitCamera, orbitDrag, orbitZoom, type OrbitState } from './orbit.js'
import { RenderScheduler } from './scheduler.js'
import type { ParamsDoc, RenderRequest, SchemaField, StyleReport } from './types.js'
import { validateParams } from './validate.js'

const DEBOUNCE_MS = 150
const VIEWPORT: [number, number] = [512, 512]

interface SessionState {
  meshId: string
  orbit: OrbitState
  params: ParamsDoc
}

const api = new ApiClient('')

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id)
  if (!node) throw new Error(`missing element #${id}`)
  return node as T
}

function formatValue(field: SchemaField, value: number | number[]): string {
  if (Array.isArray(value)) return value.map((c) => c.toFixed(2)).join(', ')
  return field.type === 'int' ? String(value) : value.toPrecision(3)
}

function buildPanelDom(
  panel: ControlPanel,
  onChange: () => void,
): void {
  const host = el<HTMLDivElement>('controls')
  host.textContent = ''
  for (const control of panel.controls) {
    const field = control.field
    const row = document.createElement('div')
    row.className = 'control-row'
    row.dataset.field = field.name

    const label = document.createElement('label')
    label.textContent = field.name
    label.title = field.doc
    if (field.provenance === 'paper') {
      const badge = document.createElement('span')
      badge.className = 'badge'
      badge.textContent = 'measured'
      badge.title = 'calibrated style constant'
      label.appendChild(badge)
    }
    row.appendChild(label)

    const readout = document.createElement('span')
    readout.className = 'readout'
    readout.textContent = formatValue(field, control.value)

    const error = document.createElement('div')
    error.className = 'error'

    const refresh = () => {
      readout.textContent = formatValue(field, control.value)
      error.textContent = control.error ?? ''
      row.classList.toggle('invalid', control.error !== null)
    }
    ;(row as HTMLElement & { refresh?: () => void }).refresh = refresh

    if (field.type === 'rgb') {
      const group = document.createElement('div')
      group.className = 'rgb-group'
      const inputs: HTMLInputElement[] = []
      for (let c = 0; c < 3; c += 1) {
        const input = document.createElement('input')
        input.type = 'number'
        input.step = '0.05'
        input.min = String(field.min)
        input.max = String(field.max)
        input.value = String((control.value as number[])[c])
        input.addEventListener('change', () => {
          const triple = inputs.map((i) => Number(i.value))
          const bad = panel.set(field.name, triple)
          refresh()
          if (!bad) onChange()
        })
        inputs.push(input)
        group.appendChild(input)
      }
      row.appendChild(group)
    } else {
      const slider = document.createElement('input')
      slider.type = 'range'
      slider.min = String(field.min)
      slider.max = String(field.max)
      slider.step = field.type === 'int' ? '1' : String((field.max - field.min) / 200)
      slider.value = String(control.value)

      const number = document.createElement('input')
      number.type = 'number'
      number.min = String(field.min)
      number.max = String(field.max)
      number.step = slider.step
      number.value = String(control.value)

      const push = (raw: string) => {
        const value = field.type === 'int' ? Math.round(Number(raw)) : Number(raw)
        const bad = panel.set(field.name, value)
        if (!bad) {
          slider.value = String(value)
          number.value = String(value)
        }
        refresh()
        if (!bad) onChange()
      }
      slider.addEventListener('input', () => push(slider.value))
      number.addEventListener('change', () => push(number.value))
      row.appendChild(slider)
      row.appendChild(number)
    }
    row.appendChild(readout)
    row.appendChild(error)
    host.appendChild(row)
  }
}

function refreshPanelDom(): void {
  document.querySelectorAll<HTMLElement>('.control-row').forEach((row) => {
    ;(row as HTMLElement & { refresh?: () => void }).refresh?.()
  })
}

function showViolations(panel: ControlPanel, violations: { field: string; message: string }[]): void {
  for (const violation of violations) panel.setError(violation.field, violation.message)
  refreshPanelDom()
}

async function start(): Promise<void> {
  const status = el<HTMLSpanElement>('status')
  let schema: SchemaField[]
  let meshes: string[]
  try {
    ;[schema, meshes] = await Promise.all([api.schema(), api.meshes()])
  } catch (error) {
    status.textContent = `service unreachable: ${error}`
    el<HTMLButtonElement>('retry').hidden = false
    el<HTMLButtonElement>('retry').onclick = () => {
      el<HTMLButtonElement>('retry').hidden = true
      void start()
    }
    return
  }

  const panel = buildControlPanel(schema)
  const meshSelect = el<HTMLSelectElement>('mesh')
  meshSelect.textContent = ''
  for (const id of meshes) {
    const option = document.createElement('option')
    option.value = id
    option.textContent = id
    meshSelect.appendChild(option)
  }

  const session: SessionState = {
    meshId: meshes[0] ?? '',
    orbit: { ...DEFAULT_ORBIT },
    params: panel.params(),
  }

  const image = el<HTMLImageElement>('preview')
  const timingsOut = el<HTMLPreElement>('timings')
  const reportOut = el<HTMLPreElement>('report')
  const lineCanvas = el<HTMLCanvasElement>('line-hist')
  const litCanvas = el<HTMLCanvasElement>('lit-hist')
  let imageUrl: string | null = null

  const renderScheduler = new RenderScheduler<RenderRequest, { blob: Blob; millis: number }>(
    DEBOUNCE_MS,
    {
      send: (req) => api.render(req),
      apply: ({ blob, millis }) => {
        if (imageUrl) URL.revokeObjectURL(imageUrl)
        imageUrl = URL.createObjectURL(blob)
        image.src = imageUrl
        status.textContent = `rendered in ${millis.toFixed(0)} ms`
        void api.lastTimings().then((t) => {
          const rows = Object.entries(t.stages)
            .map(([stage, ms]) => `${stage.padEnd(14)} ${ms.toFixed(1)} ms`)
            .join('\n')
          timingsOut.textContent = rows
        })
      },
      onError: (error) => {
        if (error instanceof ServiceError && error.violations.length) {
          showViolations(panel, error.violations)
          status.textContent = error.message
        } else {
          status.textContent = `render failed: ${error}`
        }
      },
    },
  )

  const metricsScheduler = new RenderScheduler<RenderRequest, StyleReport>(DEBOUNCE_MS * 4, {
    send: (req) => api.metrics(req),
    apply: (report) => {
      const { line_histogram, lit_histogram, ...rest } = report
      reportOut.textContent = JSON.stringify(rest, null, 1)
      if (line_histogram) drawHistogram(lineCanvas, line_histogram, LINE_BAND)
      if (lit_histogram) drawHistogram(litCanvas, lit_histogram, LIT_BAND)
    },
    onError: () => {
      reportOut.textContent = 'metrics unavailable for this frame'
    },
  })

  const requestRender = () => {
    session.params = panel.params()
    const violations = validateParams(schema, session.params)
    if (violations.length) {
      showViolations(panel, violations)
      return // invalid documents never leave the client
    }
    const request: RenderRequest = {
      mesh_id: session.meshId,
      camera: orbitCamera(session.orbit, VIEWPORT),
      params: session.params,
    }
    renderScheduler.request(request)
    metricsScheduler.request(request)
  }

  meshSelect.addEventListener('change', () => {
    session.meshId = meshSelect.value
    requestRender()
  })
  el<HTMLButtonElement>('reset').addEventListener('click', () => {
    panel.reset()
    refreshPanelDom()
    buildPanelDom(panel, requestRender)
    requestRender()
  })

  // orbit interaction on the preview image
  let dragging = false
  let last: [number, number] = [0, 0]
  image.addEventListener('pointerdown', (e) => {
    dragging = true
    last = [e.clientX, e.clientY]
    image.setPointerCapture(e.pointerId)
  })
  image.addEventListener('pointermove', (e) => {
    if (!dragging) return
    session.orbit = orbitDrag(session.orbit, e.clientX - last[0], e.clientY - last[1])
    last = [e.clientX, e.clientY]
    requestRender()
  })
  image.addEventListener('pointerup', () => {
    dragging = false
  })
  image.addEventListener('wheel', (e) => {
    e.preventDefault()
    session.orbit = orbitZoom(session.orbit, e.deltaY)
    requestRender()
  })

  buildPanelDom(panel, requestRender)
  status.textContent = 'ready'
  requestRender()
  renderScheduler.flush()
  metricsScheduler.flush()
}

void start()
