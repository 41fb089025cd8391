"""Annotated-document model: tokens, sentences, constituency trees, corpus IO.

Documents either arrive pre-annotated (one JSON file per document, with
optional POS tags and bracketed parse trees) or as plain text, in which case
a deterministic rule tokenizer supplies the token layer and ``flat_tree``
supplies a degenerate parse so every downstream stage can run standalone.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator


class CorpusError(ValueError):
    """Raised for malformed corpus files or inconsistent annotations."""


ANNOTATION_LEVELS = ("raw", "tokenized", "pos_tagged", "parsed")
PLACEHOLDER_POS = "X"


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    pos: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class ParseTree:
    """Constituency node: internal nodes carry children, leaves carry a token index."""

    label: str
    children: tuple["ParseTree", ...] = ()
    leaf_token: int | None = None

    def __post_init__(self) -> None:
        if bool(self.children) == (self.leaf_token is not None):
            raise CorpusError(
                f"tree node {self.label!r} must have children xor a leaf token"
            )

    @property
    def is_leaf(self) -> bool:
        return self.leaf_token is not None

    def leaves(self) -> Iterator["ParseTree"]:
        if self.is_leaf:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()


@dataclass(frozen=True)
class Sentence:
    index: int
    tokens: tuple[Token, ...]
    tree: ParseTree | None = None

    def text(self, raw_text: str) -> str:
        if not self.tokens:
            return ""
        return raw_text[self.tokens[0].char_start : self.tokens[-1].char_end]


@dataclass(frozen=True)
class Document:
    id: str
    source_uri: str
    raw_text: str
    sentences: tuple[Sentence, ...]
    annotation_level: str
    relevance_label: bool | None = None


# ---------------------------------------------------------------------------
# Rule tokenizer
# ---------------------------------------------------------------------------

_SENT_FINAL = {".", "!", "?"}
_TRAILING = set(".,!?;:)]}\"'")
_LEADING = set("([{\"'")


def _split_chunk(text: str, start: int, end: int) -> list[tuple[int, int]]:
    """Detach leading/trailing punctuation from one whitespace-delimited chunk."""
    lead: list[tuple[int, int]] = []
    trail: list[tuple[int, int]] = []
    while end - start > 1 and text[start] in _LEADING:
        lead.append((start, start + 1))
        start += 1
    while end - start > 1 and text[end - 1] in _TRAILING:
        # keep function-call symbols like "pAlloc()" intact
        if end - start > 2 and text[end - 2 : end] == "()":
            break
        trail.append((end - 1, end))
        end -= 1
    return lead + [(start, end)] + trail[::-1]


def _boundary_after(text: str, i: int) -> bool:
    # sentence ends at ./!/? followed by whitespace + capital, or end of text
    if i >= len(text):
        return True
    if not text[i].isspace():
        return False
    while i < len(text) and text[i].isspace():
        i += 1
    return i >= len(text) or text[i].isupper()


def tokenize(raw_text: str) -> list[Sentence]:
    """Deterministic rule tokenization of plain text into sentences.

    Splits on whitespace, detaches sentence-final punctuation and
    commas/parentheses/quotes (but never internal dots, so version strings
    like "11.0.08" survive), and breaks sentences after ".", "!" or "?"
    when followed by whitespace plus a capital letter or end of text.
    All tokens get the placeholder POS tag.
    """
    spans: list[tuple[int, int]] = []
    for m in re.finditer(r"\S+", raw_text):
        spans.extend(_split_chunk(raw_text, m.start(), m.end()))

    sentences: list[Sentence] = []
    current: list[tuple[int, int]] = []

    def flush() -> None:
        if not current:
            return
        tokens = tuple(
            Token(index=k, text=raw_text[a:b], pos=PLACEHOLDER_POS, char_start=a, char_end=b)
            for k, (a, b) in enumerate(current)
        )
        sentences.append(Sentence(index=len(sentences), tokens=tokens))
        current.clear()

    for a, b in spans:
        current.append((a, b))
        if raw_text[a:b] in _SENT_FINAL and _boundary_after(raw_text, b):
            flush()
    flush()
    return sentences


# ---------------------------------------------------------------------------
# Bracketed trees
# ---------------------------------------------------------------------------

_ESCAPES = (("-LRB-", "("), ("-RRB-", ")"))


def parse_bracketed_tree(s: str) -> ParseTree:
    """Parse a Penn-style bracketed tree, e.g. ``(S (NP (N I)) (VP (V like) (N eggs)))``.

    Leaf words become leaf nodes numbered in reading order; ``-LRB-``/``-RRB-``
    in leaf words are unescaped back to parentheses.
    """
    pos = 0
    n = len(s)
    next_leaf = [0]

    def fail(msg: str, at: int) -> None:
        raise CorpusError(f"tree parse error at offset {at}: {msg}")

    def skip_ws() -> None:
        nonlocal pos
        while pos < n and s[pos].isspace():
            pos += 1

    def read_atom() -> str:
        nonlocal pos
        start = pos
        while pos < n and not s[pos].isspace() and s[pos] not in "()":
            pos += 1
        if pos == start:
            fail("expected a symbol", start)
        return s[start:pos]

    def parse_node() -> ParseTree:
        nonlocal pos
        skip_ws()
        if pos >= n or s[pos] != "(":
            fail("expected '('", pos)
        open_at = pos
        pos += 1
        skip_ws()
        label = read_atom()
        children: list[ParseTree] = []
        while True:
            skip_ws()
            if pos >= n:
                fail("unbalanced parentheses", pos)
            if s[pos] == ")":
                pos += 1
                break
            if s[pos] == "(":
                children.append(parse_node())
            else:
                word = read_atom()
                for esc, raw in _ESCAPES:
                    word = word.replace(esc, raw)
                children.append(ParseTree(word, leaf_token=next_leaf[0]))
                next_leaf[0] += 1
        if not children:
            fail(f"empty node {label!r}", open_at)
        return ParseTree(label, children=tuple(children))

    skip_ws()
    tree = parse_node()
    skip_ws()
    if pos != n:
        fail("trailing input after tree", pos)
    return tree


def tree_to_bracketed(tree: ParseTree) -> str:
    if tree.is_leaf:
        word = tree.label
        for esc, raw in _ESCAPES:
            word = word.replace(raw, esc)
        return word
    inner = " ".join(tree_to_bracketed(c) for c in tree.children)
    return f"({tree.label} {inner})"


def flat_tree(sentence: Sentence) -> ParseTree:
    """Fallback parse: root "S" over one preterminal per token, labeled by POS."""
    if not sentence.tokens:
        raise CorpusError(f"cannot build a tree for empty sentence {sentence.index}")
    children = tuple(
        ParseTree(tok.pos, children=(ParseTree(tok.text, leaf_token=tok.index),))
        for tok in sentence.tokens
    )
    return ParseTree("S", children=children)


def _path_to_leaf(tree: ParseTree, token_index: int, trail: list[ParseTree]) -> bool:
    trail.append(tree)
    if tree.is_leaf:
        if tree.leaf_token == token_index:
            return True
    else:
        for child in tree.children:
            if _path_to_leaf(child, token_index, trail):
                return True
    trail.pop()
    return False


def tree_path(tree: ParseTree, i: int, j: int) -> list[str]:
    """Label sequence along the unique tree path between the preterminals over tokens i and j."""
    if i == j:
        raise ValueError("tree path requires two distinct tokens")
    trail_i: list[ParseTree] = []
    trail_j: list[ParseTree] = []
    if not _path_to_leaf(tree, i, trail_i) or not _path_to_leaf(tree, j, trail_j):
        raise CorpusError(f"token index {i} or {j} not present in tree")
    pa = trail_i[:-1]  # root .. preterminal over i
    pb = trail_j[:-1]
    k = 0
    while k < min(len(pa), len(pb)) and pa[k] is pb[k]:
        k += 1
    nodes = pa[k - 1 :][::-1] + pb[k:]
    return [node.label for node in nodes]


def _preterminal_labels(tree: ParseTree) -> list[str]:
    """Parent label of each leaf, in reading order."""
    out: list[str] = []

    def walk(node: ParseTree) -> None:
        for child in node.children:
            if child.is_leaf:
                out.append(node.label)
            else:
                walk(child)

    if tree.is_leaf:
        raise CorpusError("tree root cannot be a leaf")
    walk(tree)
    return out


# ---------------------------------------------------------------------------
# Document construction, validation, serialization
# ---------------------------------------------------------------------------


def infer_annotation_level(sentences: tuple[Sentence, ...] | list[Sentence]) -> str:
    if not sentences:
        return "raw"
    if all(s.tree is not None for s in sentences):
        return "parsed"
    if all(t.pos != PLACEHOLDER_POS for s in sentences for t in s.tokens):
        return "pos_tagged"
    return "tokenized"


def validate_document(doc: Document, origin: str = "") -> None:
    where = origin or doc.id
    if doc.annotation_level not in ANNOTATION_LEVELS:
        raise CorpusError(f"{where}: unknown annotation level {doc.annotation_level!r}")
    if doc.annotation_level == "parsed" and any(s.tree is None for s in doc.sentences):
        raise CorpusError(f"{where}: level 'parsed' but a sentence has no tree")
    for si, sent in enumerate(doc.sentences):
        ctx = f"{where}: sentence {si}"
        if sent.index != si:
            raise CorpusError(f"{ctx}: index {sent.index} out of order")
        if not sent.tokens:
            raise CorpusError(f"{ctx}: has no tokens")
        prev_end = -1
        for ti, tok in enumerate(sent.tokens):
            if tok.index != ti:
                raise CorpusError(f"{ctx}: token index {tok.index} out of order")
            if not (0 <= tok.char_start < tok.char_end <= len(doc.raw_text)):
                raise CorpusError(f"{ctx}: token {ti} offsets outside raw text")
            if tok.char_start < prev_end:
                raise CorpusError(f"{ctx}: token {ti} overlaps the previous token")
            if doc.raw_text[tok.char_start : tok.char_end] != tok.text:
                raise CorpusError(
                    f"{ctx}: token {ti} text {tok.text!r} does not match raw text slice"
                )
            if not tok.pos:
                raise CorpusError(f"{ctx}: token {ti} has an empty POS tag")
            prev_end = tok.char_end
        if sent.tree is not None:
            leaves = list(sent.tree.leaves())
            if len(leaves) != len(sent.tokens) or any(
                leaf.label != tok.text for leaf, tok in zip(leaves, sent.tokens)
            ):
                raise CorpusError(f"{ctx}: tree leaves do not match the token sequence")
            for pre, tok in zip(_preterminal_labels(sent.tree), sent.tokens):
                if pre != tok.pos:
                    raise CorpusError(
                        f"{ctx}: preterminal {pre!r} disagrees with POS {tok.pos!r}"
                        f" over token {tok.text!r}"
                    )


def document_from_dict(data: dict, origin: str = "<dict>") -> Document:
    """Build and validate a Document from the annotated-json shape."""
    for field_name in ("id", "raw_text"):
        if field_name not in data:
            raise CorpusError(f"{origin}: missing required field {field_name!r}")
    sentences: list[Sentence] = []
    for si, sd in enumerate(data.get("sentences") or []):
        tokens: list[Token] = []
        for ti, td in enumerate(sd.get("tokens") or []):
            try:
                tokens.append(
                    Token(ti, td["text"], td.get("pos") or PLACEHOLDER_POS, td["start"], td["end"])
                )
            except KeyError as exc:
                raise CorpusError(
                    f"{origin}: sentence {si} token {ti}: missing field {exc}"
                ) from None
        tree = None
        tree_str = sd.get("tree")
        if tree_str:
            try:
                tree = parse_bracketed_tree(tree_str)
            except CorpusError as exc:
                raise CorpusError(f"{origin}: sentence {si}: {exc}") from None
            leaves = list(tree.leaves())
            if len(leaves) != len(tokens):
                raise CorpusError(
                    f"{origin}: sentence {si}: tree has {len(leaves)} leaves"
                    f" for {len(tokens)} tokens"
                )
            # fill missing POS tags from the tree's preterminals
            merged = []
            for tok, pre in zip(tokens, _preterminal_labels(tree)):
                if tok.pos == PLACEHOLDER_POS:
                    merged.append(replace(tok, pos=pre))
                else:
                    merged.append(tok)
            tokens = merged
        sentences.append(Sentence(si, tuple(tokens), tree))
    doc = Document(
        id=str(data["id"]),
        source_uri=data.get("source_uri", ""),
        raw_text=data["raw_text"],
        sentences=tuple(sentences),
        annotation_level=infer_annotation_level(sentences),
        relevance_label=data.get("relevance_label"),
    )
    validate_document(doc, origin=origin)
    return doc


def document_to_dict(doc: Document) -> dict:
    return {
        "id": doc.id,
        "source_uri": doc.source_uri,
        "raw_text": doc.raw_text,
        "sentences": [
            {
                "tokens": [
                    {"text": t.text, "pos": t.pos, "start": t.char_start, "end": t.char_end}
                    for t in s.tokens
                ],
                "tree": tree_to_bracketed(s.tree) if s.tree is not None else None,
            }
            for s in doc.sentences
        ],
        "relevance_label": doc.relevance_label,
    }


def with_flat_trees(doc: Document) -> Document:
    """Return a copy with flat trees attached to any sentence lacking a parse."""
    if all(s.tree is not None for s in doc.sentences):
        return doc
    sentences = tuple(
        s if s.tree is not None else replace(s, tree=flat_tree(s)) for s in doc.sentences
    )
    return replace(doc, sentences=sentences, annotation_level=infer_annotation_level(sentences))


def load_corpus(path: str | Path, format: str = "annotated-json") -> list[Document]:
    """Load all documents under ``path`` (a directory or a single file).

    ``format`` selects between "annotated-json" (one document per *.json file)
    and "plain-text" (one document per *.txt file, rule-tokenized). Documents
    come back ordered by file name; duplicate ids are rejected.
    """
    if format not in ("annotated-json", "plain-text"):
        raise ValueError(f"unknown corpus format {format!r}")
    root = Path(path)
    if root.is_dir():
        suffix = ".json" if format == "annotated-json" else ".txt"
        files = sorted(p for p in root.iterdir() if p.is_file() and p.suffix == suffix)
    elif root.exists():
        files = [root]
    else:
        raise CorpusError(f"corpus path does not exist: {root}")

    docs: list[Document] = []
    seen: dict[str, str] = {}
    for f in files:
        if format == "annotated-json":
            try:
                data = json.loads(f.read_text("utf-8"))
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{f}: line {exc.lineno}: invalid JSON: {exc.msg}") from None
            doc = document_from_dict(data, origin=str(f))
        else:
            text = f.read_text("utf-8")
            sentences = tuple(tokenize(text))
            doc = Document(
                id=f.stem,
                source_uri=str(f),
                raw_text=text,
                sentences=sentences,
                annotation_level=infer_annotation_level(sentences),
            )
        if doc.id in seen:
            raise CorpusError(f"{f}: duplicate document id {doc.id!r} (already in {seen[doc.id]})")
        seen[doc.id] = str(f)
        docs.append(doc)
    return docs
