import { readFileSync } from 'fs';

export interface CorpusDoc {
  id: string;
  text: string;
  timestamp?: string;
  domain?: string;
  payload?: string;
}

/** Read a corpus JSONL file (one object per line: id, text, optional
 * timestamp/domain/payload). Duplicate ids are rejected. */
export function readCorpusJsonl(path: string): CorpusDoc[] {
  const raw = readFileSync(path, 'utf-8');
  const docs: CorpusDoc[] = [];
  const seen = new Set<string>();
  const lines = raw.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let rec: unknown;
    try {
      rec = JSON.parse(line);
    } catch (err) {
      throw new Error(`${path}:${i + 1}: malformed JSON line`);
    }
    const obj = rec as Record<string, unknown>;
    if (typeof obj.id !== 'string' || obj.id.length === 0) {
      throw new Error(`${path}:${i + 1}: missing or empty 'id'`);
    }
    if (typeof obj.text !== 'string') {
      throw new Error(`${path}:${i + 1}: missing 'text'`);
    }
    if (seen.has(obj.id)) {
      throw new Error(`${path}:${i + 1}: duplicate document id '${obj.id}'`);
    }
    seen.add(obj.id);
    docs.push({
      id: obj.id,
      text: obj.text,
      timestamp: typeof obj.timestamp === 'string' ? obj.timestamp : undefined,
      domain: typeof obj.domain === 'string' ? obj.domain : undefined,
      payload: typeof obj.payload === 'string' ? obj.payload : undefined,
    });
  }
  return docs;
}
