// Hashed character n-gram counts. The hash must be content-stable across
// runs and platforms so that a saved model keeps scoring the same way.

export interface FeatureSpec {
  ngramOrders: number[];
  dim: number;
}

export const DEFAULT_SPEC: FeatureSpec = { ngramOrders: [1, 2], dim: 4096 };

export function validateSpec(spec: FeatureSpec): void {
  if (spec.ngramOrders.length === 0 || spec.ngramOrders.some((o) => o < 1)) {
    throw new Error("n-gram orders must be positive");
  }
  if (spec.dim < 2) {
    throw new Error("dimension must be >= 2");
  }
}

// FNV-1a over the UTF-8 bytes of "<order>|<gram>"
export function featureIndex(order: number, gram: string, dim: number): number {
  const bytes = Buffer.from(`${order}|${gram}`, "utf-8");
  let hash = 0x811c9dc5;
  for (const byte of bytes) {
    hash ^= byte;
    hash = Math.imul(hash, 0x01000193) >>> 0;
  }
  return hash % dim;
}

export function hashFeatures(text: string, spec: FeatureSpec): Map<number, number> {
  const counts = new Map<number, number>();
  const chars = Array.from(text);
  for (const order of spec.ngramOrders) {
    for (let i = 0; i + order <= chars.length; i++) {
      const gram = chars.slice(i, i + order).join("");
      const idx = featureIndex(order, gram, spec.dim);
      counts.set(idx, (counts.get(idx) ?? 0) + 1);
    }
  }
  return counts;
}
