import { openSync, writeSync, closeSync, readFileSync } from 'fs';

/** TDEB binary layout (little-endian):
 *  magic "TDEB" | u32 version=1 | u32 dim | u64 record count |
 *  per record: u16 id byte-length, UTF-8 id bytes, dim x f32 components. */

export const TDEB_MAGIC = 'TDEB';
export const TDEB_VERSION = 1;

export interface TdebRecord {
  id: string;
  vector: Float32Array;
}

export function writeTdeb(path: string, dim: number, records: TdebRecord[]): void {
  const fd = openSync(path, 'w');
  try {
    const header = Buffer.alloc(20);
    header.write(TDEB_MAGIC, 0, 'ascii');
    header.writeUInt32LE(TDEB_VERSION, 4);
    header.writeUInt32LE(dim, 8);
    header.writeBigUInt64LE(BigInt(records.length), 12);
    writeSync(fd, header);
    for (const rec of records) {
      if (rec.vector.length !== dim) {
        throw new Error(`vector for '${rec.id}' has length ${rec.vector.length}, expected ${dim}`);
      }
      const idBytes = Buffer.from(rec.id, 'utf-8');
      if (idBytes.length > 0xffff) {
        throw new Error(`id '${rec.id.slice(0, 32)}...' exceeds 65535 bytes`);
      }
      const head = Buffer.alloc(2);
      head.writeUInt16LE(idBytes.length, 0);
      writeSync(fd, head);
      writeSync(fd, idBytes);
      const body = Buffer.alloc(4 * dim);
      for (let i = 0; i < dim; i++) body.writeFloatLE(rec.vector[i], 4 * i);
      writeSync(fd, body);
    }
  } finally {
    closeSync(fd);
  }
}

export function readTdeb(path: string): { dim: number; records: TdebRecord[] } {
  const data = readFileSync(path);
  if (data.length < 20 || data.toString('ascii', 0, 4) !== TDEB_MAGIC) {
    throw new Error(`${path}: not a TDEB file`);
  }
  const version = data.readUInt32LE(4);
  if (version !== TDEB_VERSION) throw new Error(`${path}: unsupported version ${version}`);
  const dim = data.readUInt32LE(8);
  const count = Number(data.readBigUInt64LE(12));
  const records: TdebRecord[] = [];
  let offset = 20;
  for (let k = 0; k < count; k++) {
    if (offset + 2 > data.length) throw new Error(`${path}: truncated at record ${k}`);
    const idLen = data.readUInt16LE(offset);
    offset += 2;
    if (offset + idLen + 4 * dim > data.length) {
      throw new Error(`${path}: truncated at record ${k}`);
    }
    const id = data.toString('utf-8', offset, offset + idLen);
    offset += idLen;
    const vector = new Float32Array(dim);
    for (let i = 0; i < dim; i++) vector[i] = data.readFloatLE(offset + 4 * i);
    offset += 4 * dim;
    records.push({ id, vector });
  }
  if (offset !== data.length) {
    throw new Error(`${path}: ${data.length - offset} trailing bytes`);
  }
  return { dim, records };
}
