/** Keyboard shortcuts: 1/2/3 map to the three annotation classes. */

import type { LabelChoice } from "./model.js";

const KEY_MAP: Record<string, LabelChoice> = {
  "1": "positive",
  "2": "negative",
  "3": "skip",
};

export function keyToLabel(key: string): LabelChoice | null {
  return KEY_MAP[key] ?? null;
}
