"""Regenerate the checked-in binary fixtures (run from the repo root).

The TDEB file holds 12 deterministic 4-dim vectors for ids t1-0000..t4-0002,
matching the embedding-JSONL twin next to it.
"""

import json
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[2] / "src"))

from tempdrift.drift import EmbeddingTable, save_embedding_table
from tempdrift.rng import SplitMix64, derive_seed


def main():
    here = Path(__file__).parent
    entries = {}
    for dom in range(1, 5):
        for k in range(3):
            doc_id = f"t{dom}-{k:04d}"
            rng = SplitMix64(derive_seed(2024, f"fixture/{doc_id}"))
            vec = np.array([(rng.next_u64() >> 11) / float(1 << 53) * 2 - 1
                            for _ in range(4)])
            # quantize to f32 up front so the TDEB and JSONL twins carry
            # bit-identical values
            entries[doc_id] = vec.astype(np.float32).astype(np.float64)
    table = EmbeddingTable(encoder_id="toyenc", dim=4, entries=entries)
    save_embedding_table(table, here / "toy_vectors.tdeb")
    with open(here / "toy_vectors.jsonl", "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"encoder_id": "toyenc", "dim": 4}) + "\n")
        for doc_id, vec in entries.items():
            fh.write(json.dumps({"id": doc_id, "vector": list(vec)}) + "\n")
    print(f"wrote {len(entries)} vectors")


if __name__ == "__main__":
    main()
