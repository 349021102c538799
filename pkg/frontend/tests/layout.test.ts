import { describe, expect, it } from "vitest";

import { forceLayout, mulberry32 } from "../src/layout.js";
import type { SubgraphPayload } from "../src/types.js";

const sample: SubgraphPayload = {
  nodes: [0, 3, 4, 374, 511, 549, 555],
  edges: [
    { src: 0, tgt: 3, action: "Dashboard", kind: "button" },
    { src: 3, tgt: 4, action: "Leads Menu", kind: "button" },
    { src: 4, tgt: 374, action: "Click Create Lead", kind: "button" },
    { src: 374, tgt: 511, action: "Fill Lead Details", kind: "form" },
    { src: 511, tgt: 549, action: "Save", kind: "button" },
    { src: 549, tgt: 555, action: "Confirm Creation", kind: "system" },
  ],
  objective: 0,
  connected: true,
};

describe("mulberry32", () => {
  it("is deterministic for a seed", () => {
    const a = mulberry32(7);
    const b = mulberry32(7);
    const seqA = [a(), a(), a()];
    const seqB = [b(), b(), b()];
    expect(seqA).toEqual(seqB);
  });

  it("yields values in [0, 1)", () => {
    const r = mulberry32(123);
    for (let i = 0; i < 100; i++) {
      const v = r();
      expect(v).toBeGreaterThanOrEqual(0);
      expect(v).toBeLessThan(1);
    }
  });
});

describe("forceLayout", () => {
  it("is deterministic for the same subgraph and seed", () => {
    const a = forceLayout(sample, 520, 380, 42);
    const b = forceLayout(sample, 520, 380, 42);
    expect(a).toEqual(b);
  });

  it("differs for a different seed", () => {
    const a = forceLayout(sample, 520, 380, 42);
    const b = forceLayout(sample, 520, 380, 43);
    expect(a).not.toEqual(b);
  });

  it("keeps every node inside the viewport margin", () => {
    const positions = forceLayout(sample, 520, 380, 42);
    for (const p of positions) {
      expect(p.x).toBeGreaterThanOrEqual(20);
      expect(p.x).toBeLessThanOrEqual(500);
      expect(p.y).toBeGreaterThanOrEqual(20);
      expect(p.y).toBeLessThanOrEqual(360);
    }
  });

  it("positions every node exactly once", () => {
    const positions = forceLayout(sample, 520, 380);
    expect(positions.map((p) => p.id).sort((x, y) => x - y)).toEqual(
      [...sample.nodes].sort((x, y) => x - y),
    );
  });

  it("handles the empty subgraph", () => {
    expect(forceLayout({ nodes: [], edges: [], objective: 0, connected: true }, 520, 380))
      .toEqual([]);
  });

  it("separates connected nodes less than unrelated ones on a path", () => {
    const positions = forceLayout(sample, 520, 380, 42);
    const by = new Map(positions.map((p) => [p.id, p]));
    const d = (a: number, b: number) =>
      Math.hypot(by.get(a)!.x - by.get(b)!.x, by.get(a)!.y - by.get(b)!.y);
    // adjacent on the chain vs the two chain ends
    expect(d(0, 3)).toBeLessThan(d(0, 555));
  });
});
