/** Encoder resolution.
 *
 * Built-in: `hash-<dim>` (e.g. hash-64), a deterministic feature-hashing
 * sentence encoder that needs no model download — tokens are hashed into
 * signed buckets and the result is L2-normalized. Useful for tests, dry runs,
 * and air-gapped environments.
 *
 * Hub models: any other name is treated as a transformers.js model id (for
 * example Xenova/all-MiniLM-L6-v2) and resolved by dynamically importing
 * @xenova/transformers; install that package to enable it. Recommended
 * biomedical/sentence encoders to try: Universal Sentence Encoder ports,
 * all-MiniLM (SBERT family), BioLORD-2023, MedCPT query encoder.
 */

export interface Encoder {
  name: string;
  dim: number;
  encode(texts: string[]): Promise<number[][]>;
}

const FNV_OFFSET = 0xcbf29ce484222325n;
const FNV_PRIME = 0x100000001b3n;
const MASK64 = (1n << 64n) - 1n;

export function fnv1a64(text: string): bigint {
  let h = FNV_OFFSET;
  for (const byte of Buffer.from(text, 'utf-8')) {
    h ^= BigInt(byte);
    h = (h * FNV_PRIME) & MASK64;
  }
  return h;
}

function tokenize(text: string): string[] {
  return text
    .toLowerCase()
    .split(/[^\p{L}\p{N}]+/u)
    .filter((t) => t.length > 0);
}

class HashEncoder implements Encoder {
  readonly name: string;
  readonly dim: number;

  constructor(dim: number) {
    this.name = `hash-${dim}`;
    this.dim = dim;
  }

  async encode(texts: string[]): Promise<number[][]> {
    return texts.map((text) => {
      const acc = new Array<number>(this.dim).fill(0);
      for (const token of tokenize(text)) {
        const h = fnv1a64(token);
        const bucket = Number(h % BigInt(this.dim));
        const sign = (h >> 63n) & 1n ? -1 : 1;
        acc[bucket] += sign;
      }
      const norm = Math.sqrt(acc.reduce((s, x) => s + x * x, 0));
      return norm > 0 ? acc.map((x) => x / norm) : acc;
    });
  }
}

class TransformersEncoder implements Encoder {
  readonly name: string;
  dim = 0;
  private pipe: any;

  constructor(name: string, pipe: any) {
    this.name = name;
    this.pipe = pipe;
  }

  async encode(texts: string[]): Promise<number[][]> {
    const output = await this.pipe(texts, { pooling: 'mean', normalize: true });
    const rows: number[][] = output.tolist();
    if (rows.length > 0) this.dim = rows[0].length;
    return rows;
  }
}

export async function resolveEncoder(name: string): Promise<Encoder> {
  const hashMatch = /^hash-(\d+)$/.exec(name);
  if (hashMatch) {
    const dim = parseInt(hashMatch[1], 10);
    if (dim < 1 || dim > 65536) throw new Error(`hash encoder dim out of range: ${dim}`);
    return new HashEncoder(dim);
  }
  // optional dependency: resolved only at runtime, never at compile time
  const hubModule = '@xenova/transformers';
  let transformers: any;
  try {
    transformers = await import(hubModule);
  } catch {
    throw new Error(
      `encoder unavailable: '${name}' is not a built-in (hash-<dim>) and ` +
      `@xenova/transformers is not installed; npm install @xenova/transformers ` +
      `to resolve hub models`,
    );
  }
  const pipe = await transformers.pipeline('feature-extraction', name);
  return new TransformersEncoder(name, pipe);
}
