"""Relation schema, extraction patterns, and corpus matching.

Three pattern variants are supported for each relation type and direction:
the full word/POS sequence between two typed entities, an entity-anchored
contiguous window (prefix or suffix of that sequence), and the label path
through the constituency tree between the two entity head tokens.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .corpus import Document, Sentence, Token, tree_path
from .entity import EntityMention


@dataclass(frozen=True)
class RelationType:
    index: int
    subject_type: str
    name: str
    object_type: str


RELATION_TYPES: tuple[RelationType, ...] = (
    RelationType(1, "SW_Vendor", "is_vendor_of", "SW_Product"),
    RelationType(2, "SW_Version", "is_version_of", "SW_Product"),
    RelationType(3, "CVE_ID", "CVE_of_vuln", "Vuln_Term"),
    RelationType(4, "MS_ID", "MS_of_SW", "SW_Product"),
    RelationType(5, "MS_ID", "MS_of_vuln", "Vuln_Term"),
    RelationType(6, "Vuln_Term", "vuln_of_SW", "SW_Product"),
    RelationType(7, "SW_Symbol", "symbol_of", "SW_Product"),
    RelationType(8, "SW_Version", "not_version_of", "SW_Product"),
)
RELATIONS_BY_NAME: dict[str, RelationType] = {r.name: r for r in RELATION_TYPES}

DIRECTIONS = ("subject_first", "object_first")
DEFAULT_WINDOW_CAP = 5
DEFAULT_BETWEEN_CAP = 12


@dataclass(frozen=True)
class RelationInstance:
    relation: str
    subject_key: str
    object_key: str
    provenance: str = field(default="seed", compare=False)

    def __post_init__(self) -> None:
        if self.relation not in RELATIONS_BY_NAME:
            raise ValueError(f"unknown relation name {self.relation!r}")

    @property
    def identity(self) -> tuple[str, str, str]:
        return (self.relation, self.subject_key.casefold(), self.object_key.casefold())

    @property
    def key(self) -> str:
        return "rel:{}:{}:{}".format(*self.identity)


def pair_identity(relation_name: str, subject_key: str, object_key: str) -> tuple[str, str, str]:
    return (relation_name, subject_key.casefold(), object_key.casefold())


# --- pattern variants -------------------------------------------------------


@dataclass(frozen=True)
class FullBetween:
    kind: str  # "word" | "pos"
    tokens: tuple[str, ...]

    def describe(self) -> str:
        return f"full between-{self.kind} sequence: {' '.join(self.tokens)}"


@dataclass(frozen=True)
class AnchoredWindow:
    anchor: str  # "left_entity" | "right_entity"
    kind: str
    tokens: tuple[str, ...]

    def describe(self) -> str:
        side = "left" if self.anchor == "left_entity" else "right"
        return f"{side}-anchored {self.kind} window: {' '.join(self.tokens)}"


@dataclass(frozen=True)
class ParsePath:
    labels: tuple[str, ...]

    def describe(self) -> str:
        return f"parse tree path: [{', '.join(self.labels)}]"


Variant = FullBetween | AnchoredWindow | ParsePath


@dataclass(frozen=True)
class Pattern:
    relation: str
    direction: str
    variant: Variant
    provenance: str = field(default="learned", compare=False)

    def __post_init__(self) -> None:
        if self.relation not in RELATIONS_BY_NAME:
            raise ValueError(f"unknown relation name {self.relation!r}")
        if self.direction not in DIRECTIONS:
            raise ValueError(f"unknown direction {self.direction!r}")
        v = self.variant
        if isinstance(v, (FullBetween, AnchoredWindow)) and not v.tokens:
            raise ValueError("pattern token sequence must be non-empty")
        if isinstance(v, ParsePath) and len(v.labels) < 2:
            raise ValueError("parse path must have at least two labels")

    @property
    def key(self) -> str:
        v = self.variant
        if isinstance(v, FullBetween):
            kind, joined = f"full_between.{v.kind}", " ".join(v.tokens)
        elif isinstance(v, AnchoredWindow):
            kind, joined = f"anchored_window.{v.anchor}.{v.kind}", " ".join(v.tokens)
        else:
            kind, joined = "parse_path", " ".join(v.labels)
        return f"pat:{self.relation}:{self.direction}:{kind}:{joined}"

    def describe(self) -> str:
        return f"{self.relation} ({self.direction}) {self.variant.describe()}"


@dataclass(frozen=True)
class Occurrence:
    pattern_key: str
    doc_id: str
    sentence_index: int
    subject_mention: EntityMention
    object_mention: EntityMention

    @property
    def identity(self) -> tuple:
        return (
            self.pattern_key,
            self.doc_id,
            self.sentence_index,
            self.subject_mention.token_span,
            self.object_mention.token_span,
        )


# --- pair enumeration and generation ---------------------------------------


def _spans_overlap(a: tuple[int, int], b: tuple[int, int]) -> bool:
    return a[0] <= b[1] and b[0] <= a[1]


def candidate_pairs(
    sentence: Sentence,
    mentions: Sequence[EntityMention],
    relation: RelationType,
) -> list[tuple[EntityMention, EntityMention, str]]:
    """All ordered (subject, object, direction) pairs of type-compatible mentions.

    Both linear orders are produced; adjacent pairs (empty between-span) are
    included and only matter to the parse-path variant.
    """
    local = [m for m in mentions if m.sentence_index == sentence.index]
    subjects = [m for m in local if m.entity_type == relation.subject_type]
    objects = [m for m in local if m.entity_type == relation.object_type]
    pairs = []
    for s in subjects:
        for o in objects:
            if s == o or _spans_overlap(s.token_span, o.token_span):
                continue
            direction = "subject_first" if s.token_span[0] < o.token_span[0] else "object_first"
            pairs.append((s, o, direction))
    pairs.sort(key=lambda p: (p[0].token_span, p[1].token_span))
    return pairs


def _between_tokens(
    sentence: Sentence, s: EntityMention, o: EntityMention
) -> tuple[Token, ...]:
    left, right = (s, o) if s.token_span[0] < o.token_span[0] else (o, s)
    return sentence.tokens[left.token_span[1] + 1 : right.token_span[0]]


def _head(mention: EntityMention) -> int:
    # entity head token = last token of the span
    return mention.token_span[1]


def generate_patterns(
    sentence: Sentence,
    pair: tuple[EntityMention, EntityMention, str],
    relation: RelationType,
    window_cap: int = DEFAULT_WINDOW_CAP,
    between_cap: int = DEFAULT_BETWEEN_CAP,
) -> list[Pattern]:
    """Patterns nominated by one (sentence, pair): full between sequences in
    word and POS form, word windows anchored at either entity, and the parse
    tree path between the two head tokens (when the sentence has a tree)."""
    s, o, direction = pair
    out: list[Pattern] = []
    between = _between_tokens(sentence, s, o)
    if 1 <= len(between) <= between_cap:
        words = tuple(t.text.casefold() for t in between)
        tags = tuple(t.pos for t in between)
        out.append(Pattern(relation.name, direction, FullBetween("word", words)))
        out.append(Pattern(relation.name, direction, FullBetween("pos", tags)))
        for length in range(1, min(window_cap, len(words)) + 1):
            out.append(
                Pattern(relation.name, direction, AnchoredWindow("left_entity", "word", words[:length]))
            )
            out.append(
                Pattern(relation.name, direction, AnchoredWindow("right_entity", "word", words[-length:]))
            )
    if sentence.tree is not None:
        labels = tuple(tree_path(sentence.tree, _head(s), _head(o)))
        out.append(Pattern(relation.name, direction, ParsePath(labels)))
    return list(dict.fromkeys(out))


# --- matching ---------------------------------------------------------------


def _variant_matches(
    variant: Variant, sentence: Sentence, s: EntityMention, o: EntityMention
) -> bool:
    if isinstance(variant, ParsePath):
        if sentence.tree is None:
            return False
        return tuple(tree_path(sentence.tree, _head(s), _head(o))) == variant.labels
    between = _between_tokens(sentence, s, o)
    if isinstance(variant, FullBetween):
        if len(between) != len(variant.tokens):
            return False
        projected = _project(between, variant.kind)
        return projected == variant.tokens
    if len(between) < len(variant.tokens):
        return False
    projected = _project(between, variant.kind)
    if variant.anchor == "left_entity":
        return projected[: len(variant.tokens)] == variant.tokens
    return projected[-len(variant.tokens) :] == variant.tokens


def _project(tokens: Sequence[Token], kind: str) -> tuple[str, ...]:
    if kind == "word":
        return tuple(t.text.casefold() for t in tokens)
    return tuple(t.pos for t in tokens)


def match_pattern(
    pattern: Pattern, sentence: Sentence, mentions: Sequence[EntityMention], doc_id: str
) -> list[Occurrence]:
    relation = RELATIONS_BY_NAME[pattern.relation]
    occurrences = []
    for s, o, direction in candidate_pairs(sentence, mentions, relation):
        if direction != pattern.direction:
            continue
        if _variant_matches(pattern.variant, sentence, s, o):
            occurrences.append(Occurrence(pattern.key, doc_id, sentence.index, s, o))
    return occurrences


def match_corpus(
    patterns: Iterable[Pattern],
    documents: Sequence[Document],
    mentions_by_doc: Mapping[str, Sequence[EntityMention]],
) -> dict[str, list[Occurrence]]:
    """Match every pattern over every sentence; occurrence lists are deduplicated
    and deterministic (document order, then sentence, then spans)."""
    ordered = list(dict.fromkeys(patterns))
    results: dict[str, dict[tuple, Occurrence]] = {p.key: {} for p in ordered}
    for doc in documents:
        mentions = mentions_by_doc.get(doc.id, [])
        for sentence in doc.sentences:
            for pattern in ordered:
                for occ in match_pattern(pattern, sentence, mentions, doc.id):
                    results[pattern.key].setdefault(occ.identity, occ)
    return {key: list(occs.values()) for key, occs in results.items()}


# --- seed and relation-file IO ----------------------------------------------


@dataclass
class SeedSet:
    relation: str
    patterns: list[Pattern]
    instances: list[RelationInstance]


def pattern_to_dict(pattern: Pattern) -> dict:
    v = pattern.variant
    if isinstance(v, FullBetween):
        variant = {"type": "full_between", "kind": v.kind, "tokens": list(v.tokens)}
    elif isinstance(v, AnchoredWindow):
        variant = {
            "type": "anchored_window",
            "anchor": v.anchor,
            "kind": v.kind,
            "tokens": list(v.tokens),
        }
    else:
        variant = {"type": "parse_path", "labels": list(v.labels)}
    return {
        "relation": pattern.relation,
        "direction": pattern.direction,
        "variant": variant,
        "provenance": pattern.provenance,
    }


def pattern_from_dict(data: dict) -> Pattern:
    vd = data["variant"]
    vtype = vd["type"]
    if vtype == "full_between":
        variant: Variant = FullBetween(vd["kind"], tuple(vd["tokens"]))
    elif vtype == "anchored_window":
        variant = AnchoredWindow(vd["anchor"], vd["kind"], tuple(vd["tokens"]))
    elif vtype == "parse_path":
        variant = ParsePath(tuple(vd["labels"]))
    else:
        raise ValueError(f"unknown pattern variant type {vtype!r}")
    return Pattern(
        relation=data["relation"],
        direction=data["direction"],
        variant=variant,
        provenance=data.get("provenance", "seed"),
    )


def instance_to_dict(instance: RelationInstance) -> dict:
    return {
        "relation": instance.relation,
        "subject": instance.subject_key,
        "object": instance.object_key,
        "provenance": instance.provenance,
    }


def instance_from_dict(data: dict) -> RelationInstance:
    return RelationInstance(
        relation=data["relation"],
        subject_key=data["subject"],
        object_key=data["object"],
        provenance=data.get("provenance", "seed"),
    )


def load_seeds(path: str | Path) -> dict[str, SeedSet]:
    """Load per-relation seed files (``*.json``) from a directory."""
    root = Path(path)
    if not root.is_dir():
        raise ValueError(f"seeds path is not a directory: {root}")
    seeds: dict[str, SeedSet] = {}
    for f in sorted(root.glob("*.json")):
        data = json.loads(f.read_text("utf-8"))
        name = data.get("relation")
        if name not in RELATIONS_BY_NAME:
            raise ValueError(f"{f}: unknown relation name {name!r}")
        patterns = [pattern_from_dict(d) for d in data.get("patterns", [])]
        for p in patterns:
            if p.relation != name:
                raise ValueError(f"{f}: pattern relation {p.relation!r} does not match file")
        instances = [instance_from_dict(d) for d in data.get("relations", [])]
        for inst in instances:
            if inst.relation != name:
                raise ValueError(f"{f}: relation instance {inst.relation!r} does not match file")
        if name in seeds:
            raise ValueError(f"{f}: duplicate seed file for relation {name!r}")
        seeds[name] = SeedSet(name, patterns, instances)
    return seeds


def write_relations(path: str | Path, instances: Sequence[RelationInstance]) -> None:
    payload = [instance_to_dict(inst) for inst in sorted(instances, key=lambda r: r.key)]
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", "utf-8")


def load_relations(path: str | Path) -> list[RelationInstance]:
    data = json.loads(Path(path).read_text("utf-8"))
    if isinstance(data, dict):
        data = data.get("relations", [])
    return [instance_from_dict(d) for d in data]


def default_seed_dir() -> Path:
    return Path(__file__).parent / "data" / "seeds"
