import { writeFileSync } from 'fs';

import { readCorpusJsonl } from './corpus.js';
import { resolveEncoder } from './encoders.js';
import { writeTdeb, TdebRecord } from './tdeb.js';

export interface ExportJob {
  corpusPath: string;
  encoderName: string;
  outputPath: string;
  batchSize?: number;
  device?: string;
  maxChars?: number;
}

export interface ExportSummary {
  encoderName: string;
  dim: number;
  count: number;
  outputPath: string;
  sidecarPath: string;
}

/** Run the named encoder over every corpus document and write a TDEB file
 * plus a sidecar JSON describing the export. Document order and ids are
 * preserved; vectors are serialized as f32. */
export async function exportEmbeddings(job: ExportJob): Promise<ExportSummary> {
  const batchSize = job.batchSize ?? 32;
  if (batchSize < 1) throw new Error('batch size must be >= 1');
  const docs = readCorpusJsonl(job.corpusPath);
  if (docs.length === 0) throw new Error(`${job.corpusPath}: corpus is empty`);
  const encoder = await resolveEncoder(job.encoderName);

  const records: TdebRecord[] = [];
  let dim = encoder.dim;
  for (let start = 0; start < docs.length; start += batchSize) {
    const batch = docs.slice(start, start + batchSize);
    const texts = batch.map((d) =>
      job.maxChars !== undefined ? d.text.slice(0, job.maxChars) : d.text,
    );
    let rows: number[][];
    try {
      rows = await encoder.encode(texts);
    } catch (err) {
      const reason = err instanceof Error ? err.message : String(err);
      throw new Error(
        `encoding failed for batch starting at '${batch[0].id}': ${reason}` +
        (reason.toLowerCase().includes('memory') ? ' (try a smaller --batch)' : ''),
      );
    }
    if (rows.length !== batch.length) {
      throw new Error(`encoder returned ${rows.length} vectors for ${batch.length} texts`);
    }
    for (let k = 0; k < batch.length; k++) {
      const row = rows[k];
      if (!row || row.length === 0 || row.some((x) => !Number.isFinite(x))) {
        throw new Error(`document encoding failure for id '${batch[k].id}'`);
      }
      if (dim === 0) dim = row.length;
      if (row.length !== dim) {
        throw new Error(
          `document '${batch[k].id}' produced dim ${row.length}, expected ${dim}`,
        );
      }
      records.push({ id: batch[k].id, vector: Float32Array.from(row) });
    }
  }

  writeTdeb(job.outputPath, dim, records);
  const sidecarPath = `${job.outputPath}.meta.json`;
  const sidecar = {
    encoder_name: encoder.name,
    dim,
    count: records.length,
    max_chars: job.maxChars ?? null,
    truncation_policy:
      job.maxChars !== undefined
        ? `corpus texts truncated to ${job.maxChars} characters before encoding`
        : 'no exporter-side truncation; encoder-internal limits apply',
    batch_size: batchSize,
    created_at: new Date().toISOString(),
  };
  writeFileSync(sidecarPath, JSON.stringify(sidecar, null, 2) + '\n', 'utf-8');
  return {
    encoderName: encoder.name,
    dim,
    count: records.length,
    outputPath: job.outputPath,
    sidecarPath,
  };
}
