import type { ParamsDoc, SchemaField, Violation } from './types.js'
import { validateValue } from './validate.js'

/** One bound control per schema field; pure state, DOM kept separate so the
 * model is testable against a mock service. */
export interface ControlModel {
  field: SchemaField
  value: number | number[]
  error: string | null
}

export interface ControlPanel {
  controls: ControlModel[]
  /** Returns the violation when the value is rejected; valid values update
   * the model and clear the error. */
  set(name: string, value: number | number[]): Violation | null
  setError(name: string, message: string | null): void
  reset(): void
  params(): ParamsDoc
}

function clone(v: number | number[]): number | number[] {
  return Array.isArray(v) ? [...v] : v
}

export function buildControlPanel(schema: SchemaField[]): ControlPanel {
  const controls: ControlModel[] = schema.map((field) => ({
    field,
    value: clone(field.default),
    error: null,
  }))
  const byName = new Map(controls.map((c) => [c.field.name, c]))

  return {
    controls,
    set(name, value) {
      const control = byName.get(name)
      if (!control) return { field: name, message: 'unknown parameter' }
      const bad = validateValue(control.field, value)
      if (bad) {
        control.error = bad.message
        return bad
      }
      control.value = clone(value)
      control.error = null
      return null
    },
    setError(name, message) {
      const control = byName.get(name)
      if (control) control.error = message
    },
    reset() {
      for (const control of controls) {
        control.value = clone(control.field.default)
        control.error = null
      }
    },
    params() {
      const doc: ParamsDoc = {}
      for (const control of controls) doc[control.field.name] = clone(control.value)
      return doc
    },
  }
}
