export interface SchemaField {
  name: string
  default: number | number[]
  min: number
  max: number
  type: 'float' | 'int' | 'rgb'
  provenance: 'paper' | 'placeholder'
  doc: string
}

export type ParamsDoc = Record<string, number | number[]>

export interface Violation {
  field: string
  message: string
}

export interface CameraSpec {
  position?: number[]
  look_at?: number[]
  up?: number[]
  projection?: { kind: string; fov_y_deg?: number; half_height?: number }
  viewport: number[]
  near?: number
  far?: number
}

export interface RenderRequest {
  mesh_id: string
  camera: CameraSpec
  params: ParamsDoc
  outputs?: string[]
}

export interface StyleReport {
  line_band_mass: number | null
  n_line_pixels: number
  median_line_width_px: number | null
  p90_line_width_px: number | null
  dark_floor: number
  lit_band_mass: number | null
  shadow_length_ratio: number | null
  gates: Record<string, boolean>
  passed: boolean
  line_histogram?: number[]
  lit_histogram?: number[]
}

export interface Timings {
  stages: Record<string, number>
  total_ms: number | null
}
