"""Entity tagging: alias-aware gazetteers plus built-in regular expressions.

Seven entity types are recognized. Vendors, products, and vulnerability terms
come from gazetteer files (canonical<TAB>alias TSV); identifiers, versions,
and code symbols are matched per token by fixed regular expressions.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

from .corpus import Document, Sentence

ENTITY_TYPES = (
    "SW_Vendor",
    "SW_Product",
    "SW_Version",
    "CVE_ID",
    "MS_ID",
    "Vuln_Term",
    "SW_Symbol",
)
GAZETTEER_TYPES = ("SW_Vendor", "SW_Product", "Vuln_Term")
MAX_ALIAS_TOKENS = 6

# overlap tie-breaking: identifiers are unambiguous, gazetteers noisy
_PRECEDENCE = {"CVE_ID": 0, "MS_ID": 1, "SW_Symbol": 2, "SW_Version": 3}
_ROW = {name: i for i, name in enumerate(ENTITY_TYPES)}


class GazetteerError(ValueError):
    """Raised for malformed gazetteer files."""


@dataclass(frozen=True)
class EntityMention:
    doc_id: str
    sentence_index: int
    token_span: tuple[int, int]  # inclusive token indices
    entity_type: str
    canonical: str
    provenance: str = "gazetteer"

    def surface(self, sentence: Sentence) -> str:
        first, last = self.token_span
        return " ".join(t.text for t in sentence.tokens[first : last + 1])


@dataclass(frozen=True, eq=False)
class Gazetteer:
    entity_type: str
    entries: Mapping[str, str]  # case-folded alias -> canonical id


def _alias_key(alias: str) -> str:
    return " ".join(alias.casefold().split())


def load_gazetteer(path: str | Path, entity_type: str) -> Gazetteer:
    """Load a canonical<TAB>alias TSV file; '#' lines are comments.

    Aliases are case-folded; every canonical id is added as its own alias.
    An alias mapped to two different canonicals is an error.
    """
    if entity_type not in ENTITY_TYPES:
        raise GazetteerError(f"unknown entity type {entity_type!r}")
    entries: dict[str, str] = {}
    canonicals: list[str] = []
    path = Path(path)
    for lineno, line in enumerate(path.read_text("utf-8").splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) == 1:
            canonical = alias = parts[0].strip()
        elif len(parts) == 2:
            canonical, alias = parts[0].strip(), parts[1].strip()
        else:
            raise GazetteerError(f"{path}:{lineno}: expected canonical<TAB>alias")
        if not canonical or not alias:
            raise GazetteerError(f"{path}:{lineno}: empty canonical or alias")
        key = _alias_key(alias)
        if entries.get(key, canonical) != canonical:
            raise GazetteerError(
                f"{path}:{lineno}: alias {alias!r} maps to both"
                f" {entries[key]!r} and {canonical!r}"
            )
        entries[key] = canonical
        canonicals.append(canonical)
    for canonical in canonicals:
        key = _alias_key(canonical)
        if entries.get(key, canonical) != canonical:
            raise GazetteerError(
                f"{path}: canonical {canonical!r} already aliased to {entries[key]!r}"
            )
        entries[key] = canonical
    return Gazetteer(entity_type, entries)


def tag_gazetteer(doc_id: str, sentence: Sentence, gazetteer: Gazetteer) -> list[EntityMention]:
    """Greedy longest-match left-to-right over case-folded token n-grams (n <= 6)."""
    mentions: list[EntityMention] = []
    tokens = sentence.tokens
    i = 0
    while i < len(tokens):
        matched = False
        for n in range(min(MAX_ALIAS_TOKENS, len(tokens) - i), 0, -1):
            key = " ".join(t.text.casefold() for t in tokens[i : i + n])
            canonical = gazetteer.entries.get(key)
            if canonical is not None:
                mentions.append(
                    EntityMention(
                        doc_id=doc_id,
                        sentence_index=sentence.index,
                        token_span=(i, i + n - 1),
                        entity_type=gazetteer.entity_type,
                        canonical=canonical,
                        provenance="gazetteer",
                    )
                )
                i += n
                matched = True
                break
        if not matched:
            i += 1
    return mentions


_CVE_RE = re.compile(r"CVE-\d{4}-\d{4,7}")
_MS_RE = re.compile(r"MS-?\d{2}-\d{3}")
_VERSION_RE = re.compile(r"\d+(?:\.\d+)*")
_SYMBOL_CALL_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*\(\)")
_SYMBOL_FILE_RE = re.compile(r"[A-Za-z0-9_][A-Za-z0-9_.-]*\.(?:exe|dll|sys|php|js|py)", re.IGNORECASE)


def tag_regex(doc_id: str, sentence: Sentence) -> list[EntityMention]:
    """Apply the built-in per-token expressions for CVE/MS ids, versions, symbols."""
    mentions: list[EntityMention] = []
    claimed: set[int] = set()

    def add(tok_index: int, entity_type: str, canonical: str) -> None:
        mentions.append(
            EntityMention(
                doc_id=doc_id,
                sentence_index=sentence.index,
                token_span=(tok_index, tok_index),
                entity_type=entity_type,
                canonical=canonical,
                provenance="regex",
            )
        )
        claimed.add(tok_index)

    for tok in sentence.tokens:
        if _CVE_RE.fullmatch(tok.text):
            add(tok.index, "CVE_ID", tok.text.upper())
        elif _MS_RE.fullmatch(tok.text):
            add(tok.index, "MS_ID", tok.text.upper())
        elif _SYMBOL_CALL_RE.fullmatch(tok.text) or _SYMBOL_FILE_RE.fullmatch(tok.text):
            add(tok.index, "SW_Symbol", tok.text)
    for tok in sentence.tokens:
        # version digits inside an id token are already claimed above
        if tok.index not in claimed and _VERSION_RE.fullmatch(tok.text):
            add(tok.index, "SW_Version", tok.text)
    return mentions


def _resolve_overlaps(candidates: list[EntityMention]) -> list[EntityMention]:
    # longer span wins; on equal length, id types beat gazetteer types,
    # remaining ties break by declaration order of the types
    def priority(m: EntityMention):
        first, last = m.token_span
        return (
            -(last - first + 1),
            _PRECEDENCE.get(m.entity_type, 4),
            _ROW[m.entity_type],
            first,
            m.canonical,
        )

    kept: list[EntityMention] = []
    used: set[int] = set()
    for m in sorted(candidates, key=priority):
        span = range(m.token_span[0], m.token_span[1] + 1)
        if any(i in used for i in span):
            continue
        kept.append(m)
        used.update(span)
    return kept


def tag_document(document: Document, gazetteers: Mapping[str, Gazetteer]) -> list[EntityMention]:
    """Union of gazetteer and regex mentions over all sentences, overlap-resolved.

    Output is deterministic: sorted by (sentence, token span, type name).
    """
    mentions: list[EntityMention] = []
    ordered = [gazetteers[t] for t in GAZETTEER_TYPES if t in gazetteers]
    for sentence in document.sentences:
        candidates: list[EntityMention] = []
        for gazetteer in ordered:
            candidates.extend(tag_gazetteer(document.id, sentence, gazetteer))
        candidates.extend(tag_regex(document.id, sentence))
        mentions.extend(_resolve_overlaps(candidates))
    mentions.sort(key=lambda m: (m.sentence_index, m.token_span, m.entity_type))
    return mentions


def entity_type_counts(mentions: list[EntityMention]) -> list[int]:
    """Counts per entity type, fixed declaration order; sums to len(mentions)."""
    counts = [0] * len(ENTITY_TYPES)
    for m in mentions:
        counts[_ROW[m.entity_type]] += 1
    return counts


def default_gazetteer_dir() -> Path:
    return Path(__file__).parent / "data" / "gazetteers"


def load_gazetteer_dir(path: str | Path) -> dict[str, Gazetteer]:
    """Load one TSV per gazetteer-backed entity type, named ``<Type>.tsv``."""
    out: dict[str, Gazetteer] = {}
    for entity_type in GAZETTEER_TYPES:
        f = Path(path) / f"{entity_type}.tsv"
        if not f.exists():
            raise GazetteerError(f"missing gazetteer file for entity type {entity_type}: {f}")
        out[entity_type] = load_gazetteer(f, entity_type)
    return out
