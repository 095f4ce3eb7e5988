/** Brightness histogram overlays with the calibrated target bands. */

export interface BandSpec {
  lo: number
  hi: number
  label: string
}

export const LINE_BAND: BandSpec = { lo: 0.4, hi: 0.8, label: 'line band' }
export const LIT_BAND: BandSpec = { lo: 0.6, hi: 0.8, label: 'lit band' }

export function drawHistogram(
  canvas: HTMLCanvasElement,
  counts: number[],
  band: BandSpec,
): void {
  const ctx = canvas.getContext('2d')
  if (!ctx) return
  const { width, height } = canvas
  ctx.clearRect(0, 0, width, height)

  // target band backdrop
  ctx.fillStyle = 'rgba(104, 160, 99, 0.25)'
  const x0 = band.lo * width
  const x1 = band.hi * width
  ctx.fillRect(x0, 0, x1 - x0, height)

  const peak = Math.max(1, ...counts)
  ctx.fillStyle = '#5a4632'
  const barWidth = width / counts.length
  counts.forEach((count, i) => {
    if (count <= 0) return
    const h = (count / peak) * (height - 12)
    ctx.fillRect(i * barWidth, height - h, Math.max(1, barWidth), h)
  })

  ctx.strokeStyle = '#68a063'
  ctx.strokeRect(x0, 0, x1 - x0, height)
  ctx.fillStyle = '#444'
  ctx.font = '10px sans-serif'
  ctx.fillText(`${band.label} [${band.lo}, ${band.hi}]`, 4, 10)
}
