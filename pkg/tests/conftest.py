import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tempdrift.corpus import Corpus, Document, TemporalDomain

FIXTURES = Path(__file__).parent / "fixtures"


def doc(doc_id, text, label="A", ts=None):
    return Document(id=doc_id, text=text, domain_label=label, timestamp=ts)


def docs_from_texts(texts, label="A", prefix="d"):
    return [doc(f"{prefix}{i}", text, label) for i, text in enumerate(texts)]


def domain_of(documents, label="A", ordinal=1):
    return TemporalDomain(label=label, ordinal=ordinal, doc_ids=[d.id for d in documents])


@pytest.fixture
def fixtures_dir():
    return FIXTURES


@pytest.fixture
def tiny_corpus():
    texts = ["alpha beta gamma", "beta gamma delta", "gamma delta epsilon", "delta epsilon zeta"]
    documents = docs_from_texts(texts)
    return Corpus(documents), documents
