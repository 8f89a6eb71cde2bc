/** Class palette handling: id <-> display color, nearest-color lookup. */

import { ValidationError } from './exit.js';

export interface PaletteEntry {
  id: number;
  color: [number, number, number];
  name?: string;
}

export function validatePalette(entries: any): PaletteEntry[] {
  if (!Array.isArray(entries) || entries.length === 0) {
    throw new ValidationError('palette must be a non-empty list');
  }
  const out: PaletteEntry[] = [];
  const seenIds = new Set<number>();
  const seenColors = new Set<string>();
  for (const e of entries) {
    if (typeof e?.id !== 'number' || !Array.isArray(e?.color) || e.color.length !== 3) {
      throw new ValidationError('palette entries need {id, color: [r,g,b]}');
    }
    const id = e.id | 0;
    const color = e.color.map((c: number) => c | 0) as [number, number, number];
    if (id < 0 || id > 255 || color.some((c) => c < 0 || c > 255)) {
      throw new ValidationError('palette ids and colors must be 8-bit');
    }
    if (seenIds.has(id)) throw new ValidationError(`duplicate class id ${id}`);
    const key = color.join(',');
    if (seenColors.has(key)) throw new ValidationError(`duplicate palette color ${key}`);
    seenIds.add(id);
    seenColors.add(key);
    out.push({ id, color, name: e.name });
  }
  return out.sort((a, b) => a.id - b.id);
}

/** Nearest entry by Chebyshev distance; ties resolve to the lower id. */
export function nearestClassId(palette: PaletteEntry[], r: number, g: number, b: number): number {
  let best = palette[0].id;
  let bestDist = Infinity;
  for (const entry of palette) {
    const d = Math.max(
      Math.abs(r - entry.color[0]),
      Math.abs(g - entry.color[1]),
      Math.abs(b - entry.color[2]),
    );
    if (d < bestDist) {
      bestDist = d;
      best = entry.id;
    }
  }
  return best;
}

export function colorOf(palette: PaletteEntry[], id: number): [number, number, number] {
  const entry = palette.find((e) => e.id === id);
  if (!entry) throw new ValidationError(`class id ${id} missing from palette`);
  return entry.color;
}
