"""The bootstrapping engine: expand seed relations and patterns cycle by cycle.

Each relation type runs independently. One iteration: generate candidate
patterns from sentences containing known relation pairs, score and accept the
top fraction (after oracle overrides), re-match the corpus with the accepted
patterns to nominate new relation instances, score/accept those, promote
unlabeled entities flanking full-sequence matches, and stop at the first
iteration that adds no relation (or at the iteration cap).
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .corpus import Document, Sentence, with_flat_trees
from .entity import EntityMention, Gazetteer, tag_document
from .oracle import Oracle, OracleQuery
from .patterns import (
    FullBetween,
    Occurrence,
    Pattern,
    RELATIONS_BY_NAME,
    RELATION_TYPES,
    RelationInstance,
    RelationType,
    SeedSet,
    candidate_pairs,
    generate_patterns,
    instance_to_dict,
    instance_from_dict,
    match_corpus,
    pattern_from_dict,
    pattern_to_dict,
)
from .relevance import RelevanceModel, filter_corpus, train
from .scoring import (
    YES_SCORE,
    apply_oracle_override,
    score_pattern,
    score_relation,
    select_queries,
    select_top_fraction,
)

logger = logging.getLogger("secrel.bootstrap")

STATE_SCHEMA_VERSION = 1

NEGATION_CUES = ("not", "except", "prior", "earlier", "before", "excluding")
ORACLE_MODES = ("interactive", "scripted", "service", "auto_dont_know")


class ConfigError(ValueError):
    pass


@dataclass
class BootstrapConfig:
    accept_fraction: float = 0.80
    query_fraction: float = 0.02
    max_iterations: int = 10
    window_cap: int = 5
    between_cap: int = 12
    oracle_mode: str = "auto_dont_know"
    relevance_threshold: float = 0.5
    conflict_cues: tuple[str, ...] = NEGATION_CUES

    def validate(self) -> "BootstrapConfig":
        if not 0.0 < self.accept_fraction <= 1.0:
            raise ConfigError("accept_fraction: must lie in (0, 1]")
        if not 0.0 <= self.query_fraction <= 1.0:
            raise ConfigError("query_fraction: must lie in [0, 1]")
        if self.max_iterations < 1:
            raise ConfigError("max_iterations: must be at least 1")
        if self.window_cap < 1:
            raise ConfigError("window_cap: must be at least 1")
        if self.between_cap < 1:
            raise ConfigError("between_cap: must be at least 1")
        if self.oracle_mode not in ORACLE_MODES:
            raise ConfigError(f"oracle_mode: unknown mode {self.oracle_mode!r}")
        if not 0.0 < self.relevance_threshold < 1.0:
            raise ConfigError("relevance_threshold: must lie in (0, 1)")
        return self

    @classmethod
    def from_dict(cls, data: dict) -> "BootstrapConfig":
        known = set(cls.__dataclass_fields__)
        for key in data:
            if key not in known:
                raise ConfigError(f"{key}: unknown config field")
        if "conflict_cues" in data:
            data = dict(data, conflict_cues=tuple(data["conflict_cues"]))
        return cls(**data).validate()


@dataclass
class IterationStats:
    iteration: int
    patterns_nominated: int = 0
    patterns_queried: int = 0
    patterns_accepted: int = 0
    relations_nominated: int = 0
    relations_queried: int = 0
    relations_accepted: int = 0


@dataclass
class BootstrapState:
    relation_type: str
    iteration: int = 0
    known_relations: dict[str, RelationInstance] = field(default_factory=dict)
    known_patterns: dict[str, Pattern] = field(default_factory=dict)
    promoted_mentions: list[EntityMention] = field(default_factory=list)
    history: list[IterationStats] = field(default_factory=list)
    oracle_decisions: dict[str, str] = field(default_factory=dict)
    instance_scores: dict[str, float] = field(default_factory=dict)


def initial_state(
    relation_name: str,
    seed_patterns: Sequence[Pattern] = (),
    seed_instances: Sequence[RelationInstance] = (),
) -> BootstrapState:
    if relation_name not in RELATIONS_BY_NAME:
        raise ValueError(f"unknown relation name {relation_name!r}")
    state = BootstrapState(relation_type=relation_name)
    for pattern in seed_patterns:
        state.known_patterns[pattern.key] = pattern
    for instance in seed_instances:
        state.known_relations[instance.key] = instance
        state.instance_scores[instance.key] = YES_SCORE
    return state


# ---------------------------------------------------------------------------
# Iteration internals
# ---------------------------------------------------------------------------


def _occurrence_rel(relation: RelationType, occ: Occurrence) -> RelationInstance:
    return RelationInstance(
        relation=relation.name,
        subject_key=occ.subject_mention.canonical,
        object_key=occ.object_mention.canonical,
        provenance="bootstrap",
    )


def _sentence_context(doc: Document, occ: Occurrence) -> dict:
    sentence = doc.sentences[occ.sentence_index]
    base = sentence.tokens[0].char_start
    text = sentence.text(doc.raw_text)
    spans = []
    for role, mention in (("subject", occ.subject_mention), ("object", occ.object_mention)):
        first, last = mention.token_span
        spans.append(
            {
                "role": role,
                "start": sentence.tokens[first].char_start - base,
                "end": sentence.tokens[last].char_end - base,
            }
        )
    return {"text": text, "spans": sorted(spans, key=lambda s: s["start"])}


def _contexts(docs_by_id: dict[str, Document], occs: Sequence[Occurrence], limit: int = 3) -> list[dict]:
    return [_sentence_context(docs_by_id[occ.doc_id], occ) for occ in occs[:limit]]


def _ask(oracle: Oracle, queries: list[OracleQuery]) -> dict[str, str]:
    if not queries:
        return {}
    try:
        return oracle.ask(queries)
    except Exception:  # oracle failure counts as dont_know
        logger.warning("oracle failure; treating %d queries as dont_know", len(queries))
        return {q.payload["key"]: "dont_know" for q in queries}


def _wordish(text: str) -> bool:
    return any(c.isalnum() for c in text)


@dataclass(frozen=True)
class HalfMatch:
    pattern_key: str
    doc_id: str
    sentence_index: int
    typed_mention: EntityMention
    candidate_span: tuple[int, int]
    missing_role: str  # "subject" | "object"


def find_half_matches(
    pattern: Pattern, sentence: Sentence, mentions: Sequence[EntityMention], doc_id: str
) -> list[HalfMatch]:
    """Full between-word sequences flanked by one typed entity and one untyped token.

    Only full-sequence word patterns pin down both structural positions, so the
    other variants never trigger promotion.
    """
    if not isinstance(pattern.variant, FullBetween) or pattern.variant.kind != "word":
        return []
    seq = pattern.variant.tokens
    n = len(seq)
    local = [m for m in mentions if m.sentence_index == sentence.index]
    covered = {i for m in local for i in range(m.token_span[0], m.token_span[1] + 1)}
    relation = RELATIONS_BY_NAME[pattern.relation]
    if pattern.direction == "subject_first":
        left_role, right_role = "subject", "object"
    else:
        left_role, right_role = "object", "subject"
    role_type = {"subject": relation.subject_type, "object": relation.object_type}

    words = [t.text.casefold() for t in sentence.tokens]
    out: list[HalfMatch] = []
    for start in range(0, len(words) - n + 1):
        if tuple(words[start : start + n]) != seq:
            continue
        if any(i in covered for i in range(start, start + n)):
            continue
        left_m = next(
            (m for m in local if m.token_span[1] == start - 1 and m.entity_type == role_type[left_role]),
            None,
        )
        right_m = next(
            (m for m in local if m.token_span[0] == start + n and m.entity_type == role_type[right_role]),
            None,
        )
        left_free = (
            start - 1 >= 0
            and (start - 1) not in covered
            and _wordish(sentence.tokens[start - 1].text)
        )
        right_free = (
            start + n < len(words)
            and (start + n) not in covered
            and _wordish(sentence.tokens[start + n].text)
        )
        if left_m is not None and right_m is None and right_free:
            out.append(
                HalfMatch(pattern.key, doc_id, sentence.index, left_m, (start + n, start + n), right_role)
            )
        elif right_m is not None and left_m is None and left_free:
            out.append(
                HalfMatch(pattern.key, doc_id, sentence.index, right_m, (start - 1, start - 1), left_role)
            )
    return out


def entity_promotion_key(entity_type: str, surface: str) -> str:
    return f"ent:{entity_type}:{surface.casefold()}"


def promote_entity(
    pattern: Pattern,
    sentence: Sentence,
    doc_id: str,
    unlabeled_span: tuple[int, int],
    missing_role: str,
    answer: str = "dont_know",
    pattern_accepted: bool = True,
) -> EntityMention | None:
    """Label the untyped side of a half-match, subject to the oracle's answer.

    yes -> user-provenance mention; dont_know -> bootstrap-provenance mention,
    but only for accepted patterns; no -> nothing.
    """
    if answer == "no":
        return None
    if answer == "dont_know" and not pattern_accepted:
        return None
    relation = RELATIONS_BY_NAME[pattern.relation]
    entity_type = relation.subject_type if missing_role == "subject" else relation.object_type
    first, last = unlabeled_span
    surface = " ".join(t.text for t in sentence.tokens[first : last + 1])
    return EntityMention(
        doc_id=doc_id,
        sentence_index=sentence.index,
        token_span=unlabeled_span,
        entity_type=entity_type,
        canonical=surface,
        provenance="user" if answer == "yes" else "bootstrap",
    )


def _run_promotion(
    state: BootstrapState,
    documents: Sequence[Document],
    mentions: dict[str, list[EntityMention]],
    docs_by_id: dict[str, Document],
    oracle: Oracle,
    iteration: int,
) -> int:
    half_matches: list[HalfMatch] = []
    for pkey in sorted(state.known_patterns):
        pattern = state.known_patterns[pkey]
        for doc in documents:
            for sentence in doc.sentences:
                half_matches.extend(find_half_matches(pattern, sentence, mentions[doc.id], doc.id))
    if not half_matches:
        return 0

    def ent_key(h: HalfMatch) -> str:
        pattern = state.known_patterns[h.pattern_key]
        relation = RELATIONS_BY_NAME[pattern.relation]
        etype = relation.subject_type if h.missing_role == "subject" else relation.object_type
        sentence = docs_by_id[h.doc_id].sentences[h.sentence_index]
        first, last = h.candidate_span
        surface = " ".join(t.text for t in sentence.tokens[first : last + 1])
        return entity_promotion_key(etype, surface)

    if oracle.mode != "auto_dont_know":
        queries = []
        queried: set[str] = set()
        for h in half_matches:
            key = ent_key(h)
            if key in state.oracle_decisions or key in queried:
                continue
            queried.add(key)
            doc = docs_by_id[h.doc_id]
            sentence = doc.sentences[h.sentence_index]
            base = sentence.tokens[0].char_start
            spans = [
                {
                    "role": "typed",
                    "start": sentence.tokens[h.typed_mention.token_span[0]].char_start - base,
                    "end": sentence.tokens[h.typed_mention.token_span[1]].char_end - base,
                },
                {
                    "role": "candidate",
                    "start": sentence.tokens[h.candidate_span[0]].char_start - base,
                    "end": sentence.tokens[h.candidate_span[1]].char_end - base,
                },
            ]
            pattern = state.known_patterns[h.pattern_key]
            queries.append(
                oracle.make_query(
                    kind="entity",
                    relation_name=pattern.relation,
                    payload={
                        "key": key,
                        "description": f"label {key.split(':', 2)[2]!r} as {key.split(':', 2)[1]}?",
                    },
                    context=[{"text": sentence.text(doc.raw_text), "spans": sorted(spans, key=lambda s: s["start"])}],
                    iteration=iteration,
                )
            )
        state.oracle_decisions.update(_ask(oracle, queries))

    claimed = {
        (m.doc_id, m.sentence_index, k)
        for per_doc in mentions.values()
        for m in per_doc
        for k in range(m.token_span[0], m.token_span[1] + 1)
    }
    promoted = 0
    for h in half_matches:
        key = ent_key(h)
        answer = state.oracle_decisions.get(key, "dont_know")
        pattern = state.known_patterns[h.pattern_key]
        sentence = docs_by_id[h.doc_id].sentences[h.sentence_index]
        mention = promote_entity(
            pattern, sentence, h.doc_id, h.candidate_span, h.missing_role, answer=answer
        )
        if mention is None:
            continue
        positions = {
            (mention.doc_id, mention.sentence_index, k)
            for k in range(mention.token_span[0], mention.token_span[1] + 1)
        }
        # first claim wins: never stack overlapping mentions within one round
        if positions & claimed:
            continue
        claimed |= positions
        mentions[h.doc_id].append(mention)
        state.promoted_mentions.append(mention)
        promoted += 1
    return promoted


# ---------------------------------------------------------------------------
# The iteration loop
# ---------------------------------------------------------------------------


def bootstrap_relation(
    state: BootstrapState,
    documents: Sequence[Document],
    mentions_by_doc: Mapping[str, Sequence[EntityMention]],
    config: BootstrapConfig,
    oracle: Oracle | None = None,
    snapshot=None,
) -> BootstrapState:
    """Run the expansion loop for one relation type until fixpoint or the cap."""
    config.validate()
    if oracle is None:
        oracle = Oracle(mode=config.oracle_mode)
    relation = RELATIONS_BY_NAME[state.relation_type]
    if not documents:
        return state
    docs_by_id = {d.id: d for d in documents}
    mentions: dict[str, list[EntityMention]] = {
        d.id: list(mentions_by_doc.get(d.id, [])) for d in documents
    }
    for m in state.promoted_mentions:
        if m.doc_id in mentions and m not in mentions[m.doc_id]:
            mentions[m.doc_id].append(m)

    while state.iteration < config.max_iterations:
        iteration = state.iteration + 1
        stats = IterationStats(iteration=iteration)

        # (1) nominate patterns from sentences holding a known relation pair
        candidates: dict[str, Pattern] = {}
        for doc in documents:
            for sentence in doc.sentences:
                for pair in candidate_pairs(sentence, mentions[doc.id], relation):
                    subject, obj, _direction = pair
                    nominal = RelationInstance(
                        relation.name, subject.canonical, obj.canonical, provenance="bootstrap"
                    )
                    if nominal.key not in state.known_relations:
                        continue
                    for p in generate_patterns(
                        sentence, pair, relation, config.window_cap, config.between_cap
                    ):
                        if p.key in state.known_patterns:
                            continue
                        if state.oracle_decisions.get(p.key) == "no":
                            continue
                        candidates.setdefault(p.key, p)

        # (2) one matching pass over known + candidate patterns
        all_patterns = list(state.known_patterns.values()) + [
            candidates[k] for k in sorted(candidates)
        ]
        occurrences = match_corpus(all_patterns, documents, mentions)
        pattern_m: dict[str, int] = {}
        for key, occs in occurrences.items():
            idents = {_occurrence_rel(relation, occ).key for occ in occs}
            pattern_m[key] = len(idents & state.known_relations.keys())

        scored_patterns: list[tuple[str, float]] = []
        for key in sorted(candidates):
            m, n_occ = pattern_m[key], len(occurrences[key])
            if m < 1 or n_occ < 1:
                continue
            scored_patterns.append((key, score_pattern(m, n_occ)))
        stats.patterns_nominated = len(scored_patterns)

        query_keys = [
            k
            for k in select_queries(scored_patterns, config.query_fraction)
            if k not in state.oracle_decisions
        ]
        queries = [
            oracle.make_query(
                kind="pattern",
                relation_name=relation.name,
                payload={"key": key, "description": candidates[key].describe()},
                context=_contexts(docs_by_id, occurrences[key]),
                iteration=iteration,
            )
            for key in query_keys
        ]
        stats.patterns_queried = len(queries)
        state.oracle_decisions.update(_ask(oracle, queries))

        overridden_patterns = [
            (key, apply_oracle_override(score, state.oracle_decisions.get(key, "dont_know")))
            for key, score in scored_patterns
        ]
        accepted_pattern_keys = select_top_fraction(overridden_patterns, config.accept_fraction)
        for key in accepted_pattern_keys:
            state.known_patterns[key] = candidates[key]
        stats.patterns_accepted = len(accepted_pattern_keys)

        # (3) nominate relations from every known pattern's occurrences
        rel_candidates: dict[str, dict] = {}
        for pkey in state.known_patterns:
            for occ in occurrences.get(pkey, []):
                inst = _occurrence_rel(relation, occ)
                if inst.key in state.known_relations:
                    continue
                if state.oracle_decisions.get(inst.key) == "no":
                    continue
                entry = rel_candidates.setdefault(
                    inst.key, {"instance": inst, "supporting": {}, "occurrences": []}
                )
                entry["supporting"][pkey] = pattern_m[pkey]
                entry["occurrences"].append(occ)

        scored_relations = [
            (key, score_relation(list(entry["supporting"].values())))
            for key, entry in sorted(rel_candidates.items())
        ]
        stats.relations_nominated = len(scored_relations)

        rel_query_keys = [
            k
            for k in select_queries(scored_relations, config.query_fraction)
            if k not in state.oracle_decisions
        ]
        rel_queries = []
        for key in rel_query_keys:
            entry = rel_candidates[key]
            inst = entry["instance"]
            rel_queries.append(
                oracle.make_query(
                    kind="relation",
                    relation_name=relation.name,
                    payload={
                        "key": key,
                        "subject": inst.subject_key,
                        "object": inst.object_key,
                        "description": f"({inst.subject_key}, {relation.name}, {inst.object_key})",
                    },
                    context=_contexts(docs_by_id, entry["occurrences"]),
                    iteration=iteration,
                )
            )
        stats.relations_queried = len(rel_queries)
        state.oracle_decisions.update(_ask(oracle, rel_queries))

        overridden_relations = [
            (key, apply_oracle_override(score, state.oracle_decisions.get(key, "dont_know")))
            for key, score in scored_relations
        ]
        accepted_relation_keys = select_top_fraction(overridden_relations, config.accept_fraction)
        final_scores = dict(overridden_relations)
        for key in accepted_relation_keys:
            inst = rel_candidates[key]["instance"]
            if state.oracle_decisions.get(key) == "yes":
                inst = RelationInstance(inst.relation, inst.subject_key, inst.object_key, "user")
            state.known_relations[key] = inst
            state.instance_scores[key] = final_scores[key]
        stats.relations_accepted = len(accepted_relation_keys)

        # (4) promote unlabeled entities flanking known full-sequence patterns
        promoted = _run_promotion(state, documents, mentions, docs_by_id, oracle, iteration)

        state.iteration = iteration
        state.history.append(stats)
        logger.info(
            "relation %s iteration %d: patterns %d nominated / %d queried / %d accepted;"
            " relations %d/%d/%d",
            relation.name,
            iteration,
            stats.patterns_nominated,
            stats.patterns_queried,
            stats.patterns_accepted,
            stats.relations_nominated,
            stats.relations_queried,
            stats.relations_accepted,
        )
        if snapshot is not None:
            snapshot.update_relation(
                relation.name,
                state,
                pattern_rows=[
                    {
                        "key": key,
                        "score": score,
                        "answer": state.oracle_decisions.get(key),
                        "accepted": key in accepted_pattern_keys,
                    }
                    for key, score in overridden_patterns
                ],
                relation_rows=[
                    {
                        "key": key,
                        "score": score,
                        "answer": state.oracle_decisions.get(key),
                        "accepted": key in accepted_relation_keys,
                    }
                    for key, score in overridden_relations
                ],
            )
        # fixpoint: nothing new to propagate into the next cycle
        if not accepted_relation_keys and not promoted:
            break
    return state


# ---------------------------------------------------------------------------
# Conflicts
# ---------------------------------------------------------------------------


def conflict_key(subject_key: str, object_key: str) -> str:
    return f"conflict:{subject_key.casefold()}:{object_key.casefold()}"


def resolve_conflict(
    candidate_a: tuple[RelationInstance, float],
    candidate_b: tuple[RelationInstance, float],
    between_words: Sequence[str],
    oracle: Oracle | None = None,
    cues: Sequence[str] = NEGATION_CUES,
    context: list[dict] | None = None,
    iteration: int = 0,
) -> tuple[RelationInstance, str]:
    """Choose between conflicting nominations over one entity pair.

    Order of authority: the oracle (asked to confirm the negative reading),
    then a negation-cue heuristic on the between-span, then the higher score,
    with ties going to the negative reading. Returns (chosen, how).
    """
    a, score_a = candidate_a
    b, score_b = candidate_b
    if "not_version_of" not in (a.relation, b.relation) or a.relation == b.relation:
        raise ValueError("conflict resolution expects is_version_of vs not_version_of")
    negative = a if a.relation == "not_version_of" else b
    positive = b if negative is a else a
    if oracle is not None and oracle.mode != "auto_dont_know":
        key = conflict_key(negative.subject_key, negative.object_key)
        query = oracle.make_query(
            kind="conflict",
            relation_name=negative.relation,
            payload={
                "key": key,
                "relation_a": positive.relation,
                "relation_b": negative.relation,
                "subject": negative.subject_key,
                "object": negative.object_key,
                "description": (
                    f"({negative.subject_key}, ?, {negative.object_key}):"
                    f" confirm {negative.relation} over {positive.relation}?"
                ),
            },
            context=context or [],
            iteration=iteration,
        )
        answer = _ask(oracle, [query]).get(key, "dont_know")
        if answer == "yes":
            return negative, "oracle"
        if answer == "no":
            return positive, "oracle"
    lowered = {w.casefold() for w in between_words}
    if any(cue in lowered for cue in cues):
        return negative, "cue"
    if score_a > score_b:
        return a, "score"
    if score_b > score_a:
        return b, "score"
    return negative, "tie"


def _find_pair_context(
    documents: Sequence[Document],
    mentions_by_doc: Mapping[str, Sequence[EntityMention]],
    relation: RelationType,
    subject_key: str,
    object_key: str,
) -> tuple[list[str], list[dict]]:
    """Between-span words and a rendered context for the first sentence holding the pair."""
    for doc in documents:
        for sentence in doc.sentences:
            for s, o, _direction in candidate_pairs(sentence, mentions_by_doc.get(doc.id, []), relation):
                if (
                    s.canonical.casefold() == subject_key.casefold()
                    and o.canonical.casefold() == object_key.casefold()
                ):
                    left, right = (s, o) if s.token_span[0] < o.token_span[0] else (o, s)
                    between = [
                        t.text
                        for t in sentence.tokens[left.token_span[1] + 1 : right.token_span[0]]
                    ]
                    occ = Occurrence("", doc.id, sentence.index, s, o)
                    return between, [_sentence_context(doc, occ)]
    return [], []


# ---------------------------------------------------------------------------
# State persistence
# ---------------------------------------------------------------------------


def state_to_dict(state: BootstrapState) -> dict:
    return {
        "schema_version": STATE_SCHEMA_VERSION,
        "relation_type": state.relation_type,
        "iteration": state.iteration,
        "known_relations": [
            instance_to_dict(state.known_relations[k]) for k in sorted(state.known_relations)
        ],
        "known_patterns": [
            pattern_to_dict(state.known_patterns[k]) for k in sorted(state.known_patterns)
        ],
        "promoted_mentions": [
            {
                "doc_id": m.doc_id,
                "sentence_index": m.sentence_index,
                "span": list(m.token_span),
                "entity_type": m.entity_type,
                "canonical": m.canonical,
                "provenance": m.provenance,
            }
            for m in state.promoted_mentions
        ],
        "history": [vars(h).copy() for h in state.history],
        "oracle_decisions": dict(sorted(state.oracle_decisions.items())),
        "instance_scores": dict(sorted(state.instance_scores.items())),
    }


def state_from_dict(data: dict) -> BootstrapState:
    version = data.get("schema_version")
    if version != STATE_SCHEMA_VERSION:
        raise ValueError(
            f"state schema version mismatch: file has {version!r},"
            f" expected {STATE_SCHEMA_VERSION}"
        )
    name = data["relation_type"]
    if name not in RELATIONS_BY_NAME:
        raise ValueError(f"unknown relation name {name!r} in state file")
    state = BootstrapState(relation_type=name, iteration=data["iteration"])
    for d in data["known_relations"]:
        inst = instance_from_dict(d)
        state.known_relations[inst.key] = inst
    for d in data["known_patterns"]:
        pattern = pattern_from_dict(d)
        state.known_patterns[pattern.key] = pattern
    for d in data["promoted_mentions"]:
        state.promoted_mentions.append(
            EntityMention(
                doc_id=d["doc_id"],
                sentence_index=d["sentence_index"],
                token_span=tuple(d["span"]),
                entity_type=d["entity_type"],
                canonical=d["canonical"],
                provenance=d["provenance"],
            )
        )
    state.history = [IterationStats(**h) for h in data["history"]]
    state.oracle_decisions = dict(data["oracle_decisions"])
    state.instance_scores = dict(data["instance_scores"])
    return state


def export_state(state: BootstrapState, path: str | Path) -> None:
    Path(path).write_text(
        json.dumps(state_to_dict(state), indent=2, sort_keys=True) + "\n", "utf-8"
    )


def import_state(path: str | Path) -> BootstrapState:
    return state_from_dict(json.loads(Path(path).read_text("utf-8")))


# ---------------------------------------------------------------------------
# Full pipeline
# ---------------------------------------------------------------------------


@dataclass
class PipelineResult:
    states: dict[str, BootstrapState]
    extracted: list[RelationInstance]
    conflicts: list[dict]
    kept_ids: list[str]
    dropped_ids: list[str]


def run_pipeline(
    documents: Sequence[Document],
    gazetteers: Mapping[str, Gazetteer],
    seeds: Mapping[str, SeedSet],
    config: BootstrapConfig,
    relevance_model: RelevanceModel | None = None,
    oracle: Oracle | None = None,
    snapshot=None,
) -> PipelineResult:
    """Tag entities, gate documents, attach trees to the keepers, then bootstrap
    each seeded relation type independently and assemble the combined extraction."""
    config.validate()
    if oracle is None:
        oracle = Oracle(mode=config.oracle_mode)

    mentions_by_doc = {doc.id: tag_document(doc, gazetteers) for doc in documents}

    model = relevance_model
    if model is None:
        labeled = [
            (tuple(map(float, _counts(mentions_by_doc[d.id]))), bool(d.relevance_label))
            for d in documents
            if d.relevance_label is not None
        ]
        labels = {y for _, y in labeled}
        if labels == {True, False}:
            model = train(labeled, threshold=config.relevance_threshold)
            logger.info("trained relevance gate on %d labeled documents", len(labeled))
    if model is not None:
        kept, dropped = filter_corpus(model, documents, mentions_by_doc)
    else:
        kept, dropped = list(documents), []
    logger.info("relevance gate kept %d of %d documents", len(kept), len(documents))

    # expensive tree layer only for the survivors
    parsed = [with_flat_trees(doc) for doc in kept]

    states: dict[str, BootstrapState] = {}
    for relation in RELATION_TYPES:
        seed_set = seeds.get(relation.name)
        if seed_set is None or (not seed_set.patterns and not seed_set.instances):
            logger.warning("relation %s has no seeds; skipped", relation.name)
            continue
        state = initial_state(relation.name, seed_set.patterns, seed_set.instances)
        states[relation.name] = bootstrap_relation(
            state, parsed, mentions_by_doc, config, oracle, snapshot
        )

    conflicts, dropped_keys = _pipeline_conflicts(states, parsed, mentions_by_doc, oracle, config)
    extracted = [
        inst
        for name in sorted(states)
        for key, inst in sorted(states[name].known_relations.items())
        if key not in dropped_keys
    ]
    return PipelineResult(
        states=states,
        extracted=extracted,
        conflicts=conflicts,
        kept_ids=[d.id for d in kept],
        dropped_ids=[d.id for d in dropped],
    )


def _counts(mentions: Sequence[EntityMention]) -> list[int]:
    from .entity import entity_type_counts

    return entity_type_counts(list(mentions))


def _pipeline_conflicts(
    states: Mapping[str, BootstrapState],
    documents: Sequence[Document],
    mentions_by_doc: Mapping[str, Sequence[EntityMention]],
    oracle: Oracle,
    config: BootstrapConfig,
) -> tuple[list[dict], set[str]]:
    """Resolve is_version_of vs not_version_of claims over the same entity pair.

    Per-type states are left untouched (no retraction); the loser is only
    removed from the combined extraction.
    """
    pos_state = states.get("is_version_of")
    neg_state = states.get("not_version_of")
    if pos_state is None or neg_state is None:
        return [], set()
    by_pair_pos = {
        (inst.identity[1], inst.identity[2]): key
        for key, inst in pos_state.known_relations.items()
    }
    conflicts: list[dict] = []
    dropped: set[str] = set()
    for neg_key, neg_inst in sorted(neg_state.known_relations.items()):
        pair = (neg_inst.identity[1], neg_inst.identity[2])
        pos_key = by_pair_pos.get(pair)
        if pos_key is None:
            continue
        pos_inst = pos_state.known_relations[pos_key]
        between, context = _find_pair_context(
            documents,
            mentions_by_doc,
            RELATIONS_BY_NAME["is_version_of"],
            pos_inst.subject_key,
            pos_inst.object_key,
        )
        chosen, how = resolve_conflict(
            (pos_inst, pos_state.instance_scores.get(pos_key, 0.0)),
            (neg_inst, neg_state.instance_scores.get(neg_key, 0.0)),
            between,
            oracle=oracle,
            cues=config.conflict_cues,
            context=context,
        )
        loser_key = neg_key if chosen is pos_inst else pos_key
        dropped.add(loser_key)
        conflicts.append(
            {
                "subject": pos_inst.subject_key,
                "object": pos_inst.object_key,
                "chosen": chosen.relation,
                "dropped": loser_key,
                "via": how,
            }
        )
    return conflicts, dropped
