import json
from pathlib import Path

import pytest

from secrel.corpus import Document, Sentence, Token, infer_annotation_level
from secrel.entity import Gazetteer, default_gazetteer_dir, load_gazetteer_dir

DATA_DIR = Path(__file__).parent / "data"
TWO_HOP = DATA_DIR / "two_hop"


@pytest.fixture(scope="session")
def default_gazetteers():
    return load_gazetteer_dir(default_gazetteer_dir())


@pytest.fixture
def two_hop_paths():
    return {
        "corpus": TWO_HOP / "corpus",
        "seeds": TWO_HOP / "seeds",
        "gazetteers": TWO_HOP / "gazetteers",
    }


def make_sentence(words, pos=None, index=0, offset=0, tree=None):
    """Build a Sentence with single-space joined offsets starting at ``offset``."""
    pos = pos or ["X"] * len(words)
    tokens = []
    at = offset
    for k, (word, tag) in enumerate(zip(words, pos)):
        tokens.append(Token(k, word, tag, at, at + len(word)))
        at += len(word) + 1
    return Sentence(index, tuple(tokens), tree)


def make_document(doc_id, sentences_words, pos=None, relevance_label=None):
    """Document whose raw text is the single-space join of all words."""
    sentences = []
    offset = 0
    parts = []
    for si, words in enumerate(sentences_words):
        tags = pos[si] if pos else None
        sent = make_sentence(words, tags, index=si, offset=offset)
        sentences.append(sent)
        parts.extend(words)
        offset += sum(len(w) + 1 for w in words)
    return Document(
        id=doc_id,
        source_uri=f"test:{doc_id}",
        raw_text=" ".join(parts),
        sentences=tuple(sentences),
        annotation_level=infer_annotation_level(sentences),
        relevance_label=relevance_label,
    )


ANNOTATED_DOC = {
    "id": "annotated-1",
    "source_uri": "test:annotated-1",
    "raw_text": "I like eggs . Acrobat 11.0.08 rocks .",
    "sentences": [
        {
            "tokens": [
                {"text": "I", "pos": "N", "start": 0, "end": 1},
                {"text": "like", "pos": "V", "start": 2, "end": 6},
                {"text": "eggs", "pos": "N", "start": 7, "end": 11},
                {"text": ".", "pos": ".", "start": 12, "end": 13},
            ],
            "tree": "(S (NP (N I)) (VP (V like) (N eggs)) (. .))",
        },
        {
            "tokens": [
                {"text": "Acrobat", "pos": "NNP", "start": 14, "end": 21},
                {"text": "11.0.08", "pos": "CD", "start": 22, "end": 29},
                {"text": "rocks", "pos": "VBZ", "start": 30, "end": 35},
                {"text": ".", "pos": ".", "start": 36, "end": 37},
            ],
            "tree": "(S (NP (NNP Acrobat) (CD 11.0.08)) (VP (VBZ rocks)) (. .))",
        },
    ],
    "relevance_label": True,
}


@pytest.fixture
def annotated_corpus_dir(tmp_path):
    corpus = tmp_path / "corpus"
    corpus.mkdir()
    (corpus / "doc1.json").write_text(json.dumps(ANNOTATED_DOC), "utf-8")
    return corpus


def tiny_gazetteers():
    return {
        "SW_Vendor": Gazetteer("SW_Vendor", {"adobe": "Adobe", "microsoft": "Microsoft"}),
        "SW_Product": Gazetteer(
            "SW_Product",
            {
                "acrobat": "Acrobat",
                "internet explorer": "Internet Explorer",
                "ie": "Internet Explorer",
                "internet": "Internet",
            },
        ),
        "Vuln_Term": Gazetteer("Vuln_Term", {"xss": "xss", "sql injection": "sql injection"}),
    }
