/** Deterministic PRNG (mulberry32) so runs reproduce exactly under a seed. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let t = state;
    t = Math.imul(t ^ (t >>> 15), t | 1);
    t ^= t + Math.imul(t ^ (t >>> 7), t | 61);
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

/** Uniform floats in [-scale, scale] for weight initialization. */
export function uniformArray(rand: () => number, size: number, scale: number): Float32Array {
  const out = new Float32Array(size);
  for (let i = 0; i < size; i++) {
    out[i] = (rand() * 2 - 1) * scale;
  }
  return out;
}

export function randInt(rand: () => number, bound: number): number {
  return Math.floor(rand() * bound);
}
