import type { CameraSpec } from './types.js'

/** Orbit camera state around a target point; angles in degrees. */
export interface OrbitState {
  azimuthDeg: number
  elevationDeg: number
  distance: number
  target: [number, number, number]
}

export const DEFAULT_ORBIT: OrbitState = {
  azimuthDeg: 55,
  elevationDeg: 20,
  distance: 3.2,
  target: [0, 0, 0],
}

const ELEVATION_LIMIT = 85

export function orbitDrag(state: OrbitState, dxPx: number, dyPx: number): OrbitState {
  const azimuthDeg = state.azimuthDeg + dxPx * 0.4
  const elevationDeg = Math.max(
    -ELEVATION_LIMIT,
    Math.min(ELEVATION_LIMIT, state.elevationDeg + dyPx * 0.4),
  )
  return { ...state, azimuthDeg, elevationDeg }
}

export function orbitZoom(state: OrbitState, wheelDelta: number): OrbitState {
  const distance = Math.max(0.2, state.distance * Math.exp(wheelDelta * 0.001))
  return { ...state, distance }
}

export function orbitCamera(state: OrbitState, viewport: [number, number]): CameraSpec {
  const az = (state.azimuthDeg * Math.PI) / 180
  const el = (state.elevationDeg * Math.PI) / 180
  const [tx, ty, tz] = state.target
  const position = [
    tx + state.distance * Math.cos(el) * Math.cos(az),
    ty + state.distance * Math.sin(el),
    tz + state.distance * Math.cos(el) * Math.sin(az),
  ]
  return {
    position,
    look_at: [tx, ty, tz],
    up: [0, 1, 0],
    projection: { kind: 'perspective', fov_y_deg: 40 },
    viewport: [viewport[0], viewport[1]],
    near: state.distance * 0.05,
    far: state.distance * 6,
  }
}
