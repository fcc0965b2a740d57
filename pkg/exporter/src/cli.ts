#!/usr/bin/env node
/** export-embeddings CLI:
 *
 *   node dist/cli.js --corpus corpus.jsonl --encoder <name> --out vectors.tdeb
 *                    [--batch 32] [--max-chars N] [--device cpu]
 */

import { exportEmbeddings } from './export.js';

function parseArgs(argv: string[]): Record<string, string> {
  const flags: Record<string, string> = {};
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    if (!arg.startsWith('--')) throw new Error(`unexpected argument '${arg}'`);
    const key = arg.slice(2);
    const value = argv[i + 1];
    if (value === undefined || value.startsWith('--')) {
      throw new Error(`flag --${key} needs a value`);
    }
    flags[key] = value;
    i++;
  }
  return flags;
}

async function main(): Promise<number> {
  let flags: Record<string, string>;
  try {
    flags = parseArgs(process.argv.slice(2));
  } catch (err) {
    console.error(`export-embeddings: ${(err as Error).message}`);
    return 2;
  }
  for (const required of ['corpus', 'encoder', 'out']) {
    if (!(required in flags)) {
      console.error(`export-embeddings: missing required flag --${required}`);
      console.error(
        'usage: export-embeddings --corpus corpus.jsonl --encoder <name> ' +
        '--out vectors.tdeb [--batch 32] [--max-chars N] [--device cpu]',
      );
      return 2;
    }
  }
  try {
    const summary = await exportEmbeddings({
      corpusPath: flags.corpus,
      encoderName: flags.encoder,
      outputPath: flags.out,
      batchSize: flags.batch !== undefined ? parseInt(flags.batch, 10) : undefined,
      maxChars: flags['max-chars'] !== undefined ? parseInt(flags['max-chars'], 10) : undefined,
      device: flags.device,
    });
    console.log(
      `wrote ${summary.count} vectors (dim ${summary.dim}) from encoder ` +
      `'${summary.encoderName}' to ${summary.outputPath}`,
    );
    console.log(`sidecar: ${summary.sidecarPath}`);
    return 0;
  } catch (err) {
    console.error(`export-embeddings: ${(err as Error).message}`);
    return 1;
  }
}

main().then((code) => {
  process.exitCode = code;
});
