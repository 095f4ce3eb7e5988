import type { ParamsDoc, SchemaField, Violation } from './types.js'

/** Validate one field value against its schema entry. */
export function validateValue(field: SchemaField, value: unknown): Violation | null {
  if (field.type === 'rgb') {
    if (!Array.isArray(value) || value.length !== 3) {
      return { field: field.name, message: 'must be an RGB triple' }
    }
    for (const c of value) {
      if (typeof c !== 'number' || Number.isNaN(c) || c < field.min || c > field.max) {
        return { field: field.name, message: `components must lie in [${field.min}, ${field.max}]` }
      }
    }
    return null
  }
  if (typeof value !== 'number' || Number.isNaN(value)) {
    return { field: field.name, message: 'must be a number' }
  }
  if (field.type === 'int' && !Number.isInteger(value)) {
    return { field: field.name, message: 'must be an integer' }
  }
  if (value < field.min || value > field.max) {
    return { field: field.name, message: `must lie in [${field.min}, ${field.max}]` }
  }
  return null
}

/** Validate a whole params document, including the cross-field rules the
 * service enforces, so the 400 path stays unreachable from the UI. */
export function validateParams(schema: SchemaField[], doc: ParamsDoc): Violation[] {
  const out: Violation[] = []
  const byName = new Map(schema.map((f) => [f.name, f]))
  for (const [name, value] of Object.entries(doc)) {
    const field = byName.get(name)
    if (!field) {
      out.push({ field: name, message: 'unknown parameter' })
      continue
    }
    const bad = validateValue(field, value)
    if (bad) out.push(bad)
  }
  const wGeom = doc['w_geom']
  const wNd = doc['w_nd']
  if (typeof wGeom === 'number' && typeof wNd === 'number' && wGeom + wNd > 1 + 1e-9) {
    out.push({ field: 'w_nd', message: `weights exceed 1: w_geom + w_nd = ${(wGeom + wNd).toFixed(3)}` })
  }
  const bMin = doc['line_b_min']
  const bMax = doc['line_b_max']
  if (typeof bMin === 'number' && typeof bMax === 'number' && bMin >= bMax) {
    out.push({ field: 'line_b_min', message: 'line_b_min must be below line_b_max' })
  }
  return out
}
