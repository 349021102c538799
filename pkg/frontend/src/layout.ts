/** Deterministic force-directed layout.
 *
 * Seeded PRNG plus a fixed iteration schedule: the same subgraph always
 * lands on the same coordinates, which keeps the inspector stable across
 * re-renders and screenshots comparable across runs.
 */

import type { SubgraphPayload } from "./types.js";

export interface NodePosition {
  id: number;
  x: number;
  y: number;
}

/** mulberry32: tiny deterministic PRNG, good enough for layout jitter. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function forceLayout(
  subgraph: SubgraphPayload,
  width: number,
  height: number,
  seed = 42,
  iterations = 150,
): NodePosition[] {
  const ids = subgraph.nodes;
  const n = ids.length;
  if (n === 0) return [];
  const rand = mulberry32(seed);
  const index = new Map(ids.map((id, i) => [id, i]));

  // start on a circle with seeded jitter so distinct nodes never coincide
  const cx = width / 2;
  const cy = height / 2;
  const radius = Math.min(width, height) * 0.35;
  const xs = new Float64Array(n);
  const ys = new Float64Array(n);
  for (let i = 0; i < n; i++) {
    const angle = (2 * Math.PI * i) / n;
    xs[i] = cx + radius * Math.cos(angle) + (rand() - 0.5) * 10;
    ys[i] = cy + radius * Math.sin(angle) + (rand() - 0.5) * 10;
  }

  const springs: [number, number][] = [];
  for (const e of subgraph.edges) {
    const a = index.get(e.src);
    const b = index.get(e.tgt);
    if (a !== undefined && b !== undefined && a !== b) springs.push([a, b]);
  }

  const k = Math.sqrt((width * height) / n) * 0.6;
  for (let iter = 0; iter < iterations; iter++) {
    const temp = 0.1 * Math.min(width, height) * (1 - iter / iterations) + 1;
    const dx = new Float64Array(n);
    const dy = new Float64Array(n);

    for (let i = 0; i < n; i++) {
      for (let j = i + 1; j < n; j++) {
        let ex = xs[i] - xs[j];
        let ey = ys[i] - ys[j];
        let dist = Math.hypot(ex, ey);
        if (dist < 1e-6) {
          ex = 1e-3;
          ey = 1e-3;
          dist = Math.hypot(ex, ey);
        }
        const rep = (k * k) / dist;
        dx[i] += (ex / dist) * rep;
        dy[i] += (ey / dist) * rep;
        dx[j] -= (ex / dist) * rep;
        dy[j] -= (ey / dist) * rep;
      }
    }
    for (const [a, b] of springs) {
      const ex = xs[a] - xs[b];
      const ey = ys[a] - ys[b];
      const dist = Math.max(Math.hypot(ex, ey), 1e-6);
      const att = (dist * dist) / k;
      dx[a] -= (ex / dist) * att;
      dy[a] -= (ey / dist) * att;
      dx[b] += (ex / dist) * att;
      dy[b] += (ey / dist) * att;
    }
    for (let i = 0; i < n; i++) {
      const disp = Math.max(Math.hypot(dx[i], dy[i]), 1e-6);
      const step = Math.min(disp, temp);
      xs[i] += (dx[i] / disp) * step;
      ys[i] += (dy[i] / disp) * step;
      xs[i] = Math.min(width - 20, Math.max(20, xs[i]));
      ys[i] = Math.min(height - 20, Math.max(20, ys[i]));
    }
  }

  return ids.map((id, i) => ({ id, x: xs[i], y: ys[i] }));
}
