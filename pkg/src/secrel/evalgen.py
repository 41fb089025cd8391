"""Synthetic corpora with planted relations, and precision/recall reporting.

The generator instantiates per-relation sentence templates (each carrying a
handcrafted constituency tree) with entities drawn from the gazetteers, so a
generated corpus arrives fully parsed and the planted relation instances are
known exactly. Noise sentences contain entities but assert no relation; some
noise shapes deliberately share trailing words with real templates so that
learned window patterns nominate spurious pairs for the oracle to reject.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Mapping, Sequence

from .corpus import Document, Sentence, Token, parse_bracketed_tree, _preterminal_labels
from .entity import Gazetteer, default_gazetteer_dir, load_gazetteer_dir
from .patterns import (
    FullBetween,
    Pattern,
    RELATIONS_BY_NAME,
    RELATION_TYPES,
    RelationInstance,
)

ENTITY_POS = {
    "SW_Vendor": "NNP",
    "SW_Product": "NNP",
    "SW_Version": "CD",
    "CVE_ID": "NN",
    "MS_ID": "NN",
    "Vuln_Term": "NN",
    "SW_Symbol": "NN",
}

VERSION_POOL = tuple(
    ["7", "8.1", "9.0.2", "10.4", "11.0.08", "12.3.1", "2.4.1", "3.0", "4.5.6", "5.2"]
    + [f"{major}.{minor}" for major in range(13, 28) for minor in (0, 1)]
)
CVE_POOL = tuple(f"CVE-2015-{1000 + i}" for i in range(80))
MS_POOL = tuple(f"MS-15-{i:03d}" for i in range(1, 81))
SYMBOL_POOL = (
    "reg.exe", "pAlloc()", "login.php", "kernel32.dll", "svchost.exe", "parse.py",
    "initSession()", "render.js", "token.sys", "httpd.exe", "freeBuffer()", "auth.dll",
    "upload.php", "sanitize()", "loader.js", "crypto.sys", "spool.exe", "gc.py",
    "queryExec()", "net.dll",
)


@dataclass(frozen=True)
class SentenceTemplate:
    tree_format: str
    relation: str | None = None  # None for noise shapes
    between: tuple[str, ...] = ()
    slots: tuple[str, ...] = ()  # entity types for noise slots
    trap_relation: str | None = None


_REL = [
    SentenceTemplate(
        "(S {S} (VP (VBZ has) (VP (VBN released) (NP (DT a) (NN fix)) (PP (IN for) {O}))) (. .))",
        relation="is_vendor_of",
        between=("has", "released", "a", "fix", "for"),
    ),
    SentenceTemplate(
        "(S {S} (VP (ADVP (RB today)) (VBD shipped) {O}) (. .))",
        relation="is_vendor_of",
        between=("today", "shipped"),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBZ is) (NP (NP (DT the) (JJS newest) (NN build)) (PP (IN of) {O}))) (. .))",
        relation="is_version_of",
        between=("is", "the", "newest", "build", "of"),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBD arrived) (PP (IN as) (NP (NP (DT an) (NN upgrade)) (PP (TO to) {O})))) (. .))",
        relation="is_version_of",
        between=("arrived", "as", "an", "upgrade", "to"),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBZ describes) (NP (DT a) {O})) (. .))",
        relation="CVE_of_vuln",
        between=("describes", "a"),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBZ tracks) (NP (DT the) (JJ reported) {O})) (. .))",
        relation="CVE_of_vuln",
        between=("tracks", "the", "reported"),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBZ delivers) (NP (NNS patches)) (PP (IN for) {O})) (. .))",
        relation="MS_of_SW",
        between=("delivers", "patches", "for"),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBZ targets) {O}) (. .))",
        relation="MS_of_SW",
        between=("targets",),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBZ addresses) (NP (DT a) {O} (NN weakness))) (. .))",
        relation="MS_of_vuln",
        between=("addresses", "a"),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBZ mitigates) (NP (DT the) {O} (NN exposure))) (. .))",
        relation="MS_of_vuln",
        between=("mitigates", "the"),
    ),
    SentenceTemplate(
        "(S (NP (DT A) {S}) (VP (VBD was) (VP (VBN found) (PP (IN in) {O}))) (. .))",
        relation="vuln_of_SW",
        between=("was", "found", "in"),
    ),
    SentenceTemplate(
        "(S (NP (DT The) {S}) (VP (VBZ plagues) {O}) (. .))",
        relation="vuln_of_SW",
        between=("plagues",),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBZ ships) (PP (IN inside) {O})) (. .))",
        relation="symbol_of",
        between=("ships", "inside"),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBZ belongs) (PP (TO to) {O})) (. .))",
        relation="symbol_of",
        between=("belongs", "to"),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBZ does) (RB not) (VP (VB ship) (PP (IN with) {O}))) (. .))",
        relation="not_version_of",
        between=("does", "not", "ship", "with"),
    ),
    SentenceTemplate(
        "(S {S} (VP (VBD was) (VP (VBN dropped) (PP (IN from) {O}))) (. .))",
        relation="not_version_of",
        between=("was", "dropped", "from"),
    ),
]

_NOISE = [
    SentenceTemplate(
        "(S (NP {A} (CC and) {B}) (VP (VBD headlined) (NP (DT the) (NN conference))) (. .))",
        slots=("SW_Vendor", "SW_Product"),
    ),
    SentenceTemplate(
        "(S (NP (NNS Analysts)) (VP (VBD praised) {A} (PP (IN during) (NP (DT the) (NN briefing)))) (. .))",
        slots=("SW_Product",),
    ),
]

# negated look-alikes: they share window fragments with real templates but
# assert no relation, so matching them is a genuine false positive
_TRAPS = [
    SentenceTemplate(
        "(S {A} (VP (VBZ has) (RB never) (VP (VBN released) (NP (DT a) (NN fix)) (PP (IN for) {B}))) (. .))",
        slots=("SW_Vendor", "SW_Product"),
        trap_relation="is_vendor_of",
    ),
    SentenceTemplate(
        "(S (NP (DT A) {A}) (VP (VBD was) (RB never) (VP (VBN found) (PP (IN in) {B}))) (. .))",
        slots=("Vuln_Term", "SW_Product"),
        trap_relation="vuln_of_SW",
    ),
]

TEMPLATE_SETS = {"default": (_REL, _NOISE, _TRAPS)}


@dataclass(frozen=True)
class SynthSpec:
    num_docs: int
    relations_per_doc: int = 2
    noise_sentence_rate: float = 0.0
    template_set: str = "default"
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.num_docs < 0 or self.relations_per_doc < 0:
            raise ValueError("document and relation counts must be non-negative")
        if not 0.0 <= self.noise_sentence_rate <= 1.0:
            raise ValueError("noise_sentence_rate must lie in [0, 1]")
        if self.template_set not in TEMPLATE_SETS:
            raise ValueError(f"unknown template set {self.template_set!r}")
        if self.noise_sentence_rate == 1.0 and self.relations_per_doc > 0:
            raise ValueError("noise_sentence_rate 1.0 leaves no room for planted relations")


def synthetic_seed_patterns(template_set: str = "default") -> dict[str, list[Pattern]]:
    """Full between-word seed patterns matching the generating templates."""
    rel_templates, _, _ = TEMPLATE_SETS[template_set]
    seeds: dict[str, list[Pattern]] = {}
    for t in rel_templates:
        pattern = Pattern(
            t.relation, "subject_first", FullBetween("word", t.between), provenance="seed"
        )
        seeds.setdefault(t.relation, []).append(pattern)
    return seeds


def _escape(token: str) -> str:
    return token.replace("(", "-LRB-").replace(")", "-RRB-")


def _entity_np(surface: str, entity_type: str) -> str:
    pos = ENTITY_POS[entity_type]
    inner = " ".join(f"({pos} {_escape(tok)})" for tok in surface.split())
    return f"(NP {inner})"


def _build_document(doc_id: str, source: str, tree_strings: Sequence[str]) -> Document:
    sentences: list[Sentence] = []
    parts: list[str] = []
    offset = 0
    for si, tree_string in enumerate(tree_strings):
        tree = parse_bracketed_tree(tree_string)
        tags = _preterminal_labels(tree)
        tokens: list[Token] = []
        for k, leaf in enumerate(tree.leaves()):
            if parts:
                parts.append(" ")
                offset += 1
            start = offset
            offset += len(leaf.label)
            parts.append(leaf.label)
            tokens.append(Token(k, leaf.label, tags[k], start, offset))
        sentences.append(Sentence(si, tuple(tokens), tree))
    return Document(
        id=doc_id,
        source_uri=source,
        raw_text="".join(parts),
        sentences=tuple(sentences),
        annotation_level="parsed",
    )


class _PairSampler:
    def __init__(self, rng: random.Random, pools: Mapping[str, Sequence[str]]):
        self.rng = rng
        self.pools = pools
        self.used: dict[str, set[tuple[str, str]]] = {}

    def fresh_pair(self, relation_name: str) -> tuple[str, str]:
        relation = RELATIONS_BY_NAME[relation_name]
        subjects = self.pools[relation.subject_type]
        objects = self.pools[relation.object_type]
        used = self.used.setdefault(relation_name, set())
        if len(used) >= len(subjects) * len(objects):
            raise ValueError(
                f"relation {relation_name}: requested more distinct entity pairs"
                f" than the gazetteers provide ({len(subjects)}x{len(objects)})"
            )
        for _ in range(200):
            pair = (self.rng.choice(subjects), self.rng.choice(objects))
            key = (pair[0].casefold(), pair[1].casefold())
            if key not in used:
                used.add(key)
                return pair
        # near-exhausted pools: fall back to a deterministic scan
        for s in subjects:
            for o in objects:
                key = (s.casefold(), o.casefold())
                if key not in used:
                    used.add(key)
                    return (s, o)
        raise ValueError(f"relation {relation_name}: entity pair space exhausted")


def generate_corpus(
    spec: SynthSpec, gazetteers: Mapping[str, Gazetteer] | None = None
) -> tuple[list[Document], list[RelationInstance]]:
    """Deterministic corpus from ``spec.rng_seed``; returns (documents, gold)."""
    if gazetteers is None:
        gazetteers = load_gazetteer_dir(default_gazetteer_dir())
    rel_templates, noise_templates, trap_templates = TEMPLATE_SETS[spec.template_set]
    by_relation: dict[str, list[SentenceTemplate]] = {}
    for t in rel_templates:
        by_relation.setdefault(t.relation, []).append(t)

    pools: dict[str, Sequence[str]] = {
        "SW_Vendor": sorted(set(gazetteers["SW_Vendor"].entries.values())),
        "SW_Product": sorted(set(gazetteers["SW_Product"].entries.values())),
        "Vuln_Term": sorted(set(gazetteers["Vuln_Term"].entries.values())),
        "SW_Version": VERSION_POOL,
        "CVE_ID": CVE_POOL,
        "MS_ID": MS_POOL,
        "SW_Symbol": SYMBOL_POOL,
    }
    for entity_type, pool in pools.items():
        if not pool:
            raise ValueError(f"empty entity pool for {entity_type}")

    rng = random.Random(spec.rng_seed)
    sampler = _PairSampler(rng, pools)
    relation_names = [r.name for r in RELATION_TYPES]
    documents: list[Document] = []
    gold: dict[tuple, RelationInstance] = {}

    for d in range(spec.num_docs):
        trees: list[str] = []
        planted = spec.relations_per_doc
        for _ in range(planted):
            name = rng.choice(relation_names)
            template = rng.choice(by_relation[name])
            subject, obj = sampler.fresh_pair(name)
            relation = RELATIONS_BY_NAME[name]
            trees.append(
                template.tree_format.format(
                    S=_entity_np(subject, relation.subject_type),
                    O=_entity_np(obj, relation.object_type),
                )
            )
            inst = RelationInstance(name, subject, obj, provenance="seed")
            gold.setdefault(inst.identity, inst)
        rate = spec.noise_sentence_rate
        if planted == 0:
            noise_count = 1 if rate > 0 else 0
        else:
            noise_count = round(planted * rate / (1.0 - rate)) if rate > 0 else 0
        for _ in range(noise_count):
            if trap_templates and rng.random() < 0.4:
                template = rng.choice(trap_templates)
                a_type, b_type = template.slots
                a, b = sampler.fresh_pair(template.trap_relation)
                trees.append(
                    template.tree_format.format(
                        A=_entity_np(a, a_type), B=_entity_np(b, b_type)
                    )
                )
            else:
                template = rng.choice(noise_templates)
                fills = {
                    slot_name: _entity_np(rng.choice(pools[slot_type]), slot_type)
                    for slot_name, slot_type in zip("AB", template.slots)
                }
                trees.append(template.tree_format.format(**fills))
        rng.shuffle(trees)
        documents.append(_build_document(f"synth-{d:03d}", f"synthetic:{spec.rng_seed}", trees))

    return documents, [gold[k] for k in sorted(gold)]


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------


@dataclass
class EvalReport:
    rows: dict[str, tuple[int, int]]  # relation name -> (TP, FP)
    recall: tuple[int, int] | None = None  # (found, labeled total)

    def precision(self, name: str) -> float | None:
        tp, fp = self.rows.get(name, (0, 0))
        return tp / (tp + fp) if tp + fp > 0 else None

    def totals(self) -> tuple[int, int, float | None]:
        tp = sum(r[0] for r in self.rows.values())
        fp = sum(r[1] for r in self.rows.values())
        precision = tp / (tp + fp) if tp + fp > 0 else None
        return tp, fp, precision

    def recall_value(self) -> float | None:
        if self.recall is None or self.recall[1] == 0:
            return None
        return self.recall[0] / self.recall[1]

    def render(self) -> str:
        # unobserved relations render as dashes, not zeros
        lines = [f"    {'Relation':<16} {'TP':>5} {'FP':>5} {'P':>6}"]
        for relation in RELATION_TYPES:
            tp, fp = self.rows.get(relation.name, (0, 0))
            if tp + fp == 0:
                lines.append(f"{relation.index:>2}  {relation.name:<16} {'-':>5} {'-':>5} {'-':>6}")
            else:
                p = tp / (tp + fp)
                lines.append(
                    f"{relation.index:>2}  {relation.name:<16} {tp:>5} {fp:>5} {p:>6.2f}"
                )
        tp, fp, precision = self.totals()
        p_text = f"{precision:.2f}" if precision is not None else "-"
        lines.append(f"    {'Totals':<16} {tp:>5} {fp:>5} {p_text:>6}")
        if self.recall is not None:
            found, labeled = self.recall
            value = self.recall_value()
            v_text = f"{value:.2f}" if value is not None else "-"
            lines.append(f"Recall: {found} of {labeled} labeled relations found = {v_text}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        rows = []
        for relation in RELATION_TYPES:
            tp, fp = self.rows.get(relation.name, (0, 0))
            rows.append(
                {
                    "relation": relation.name,
                    "tp": tp,
                    "fp": fp,
                    "precision": self.precision(relation.name),
                }
            )
        tp, fp, precision = self.totals()
        payload = {
            "rows": rows,
            "totals": {"tp": tp, "fp": fp, "precision": precision},
        }
        if self.recall is not None:
            payload["recall"] = {
                "found": self.recall[0],
                "labeled": self.recall[1],
                "value": self.recall_value(),
            }
        return payload


def evaluate(
    extracted: Sequence[RelationInstance],
    gold: Sequence[RelationInstance],
    labeled_gold: Sequence[RelationInstance] | None = None,
) -> EvalReport:
    """TP/FP per relation against gold; recall only over a fully-labeled subset."""
    extracted_ids = {inst.identity for inst in extracted}
    gold_ids = {inst.identity for inst in gold}
    rows: dict[str, tuple[int, int]] = {}
    for relation in RELATION_TYPES:
        mine = {i for i in extracted_ids if i[0] == relation.name}
        rows[relation.name] = (len(mine & gold_ids), len(mine - gold_ids))
    recall = None
    if labeled_gold is not None:
        labeled_ids = {inst.identity for inst in labeled_gold}
        recall = (len(extracted_ids & labeled_ids), len(labeled_ids))
    return EvalReport(rows=rows, recall=recall)
