"""In-memory fact store with 1-hop, type and shortest-path lookups."""

from __future__ import annotations

import json
from collections import defaultdict, deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from typing import IO

from hetqa.graph import NodeKind

INSTANCE_OF = "instanceOf"
OCCUPATION = "occupation"
HUMAN = "human"


class FormatError(ValueError):
    def __init__(self, lineno: int, message: str) -> None:
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class Qualifier:
    predicate: str
    object: str
    object_kind: NodeKind = NodeKind.ENTITY


@dataclass(frozen=True)
class KGFact:
    subject: str
    predicate: str
    object: str
    object_kind: NodeKind = NodeKind.ENTITY
    qualifiers: tuple[Qualifier, ...] = ()

    def __post_init__(self) -> None:
        if not self.subject or not self.predicate:
            raise ValueError("fact needs a nonempty subject and predicate")

    def to_record(self) -> dict:
        return {
            "s": self.subject,
            "p": self.predicate,
            "o": self.object,
            "o_kind": self.object_kind.value,
            "quals": [
                {"qp": q.predicate, "qo": q.object, "qo_kind": q.object_kind.value}
                for q in self.qualifiers
            ],
        }

    @classmethod
    def from_record(cls, rec: dict) -> KGFact:
        quals = tuple(
            Qualifier(q["qp"], q["qo"], NodeKind(q.get("qo_kind", "Entity")))
            for q in rec.get("quals") or ()
        )
        return cls(rec["s"], rec["p"], rec["o"], NodeKind(rec.get("o_kind", "Entity")), quals)

    def entity_members(self) -> list[str]:
        """Entities a path may pass through: subject, entity objects and qualifier objects."""
        out = [self.subject]
        if self.object_kind is NodeKind.ENTITY:
            out.append(self.object)
        out.extend(q.object for q in self.qualifiers if q.object_kind is NodeKind.ENTITY)
        return list(dict.fromkeys(out))


def verbalize_fact(fact: KGFact) -> str:
    parts = [fact.subject, fact.predicate, fact.object]
    for q in fact.qualifiers:
        parts += ["and", q.predicate, q.object]
    return " ".join(parts) + "."


@dataclass
class TripleStore:
    facts: list[KGFact] = field(default_factory=list)
    aliases: dict[str, frozenset[str]] = field(default_factory=dict)
    _by_term: dict[str, list[int]] = field(default_factory=lambda: defaultdict(list))
    _by_member: dict[str, list[int]] = field(default_factory=lambda: defaultdict(list))

    def add(self, fact: KGFact) -> int:
        idx = len(self.facts)
        self.facts.append(fact)
        terms = [fact.subject, fact.object] + [q.object for q in fact.qualifiers]
        for term in dict.fromkeys(terms):
            self._by_term[term].append(idx)
        for ent in fact.entity_members():
            self._by_member[ent].append(idx)
        return idx

    def add_aliases(self, label: str, aliases: Iterable[str]) -> None:
        self.aliases[label] = self.aliases.get(label, frozenset()) | frozenset(aliases)

    def __len__(self) -> int:
        return len(self.facts)

    def __iter__(self) -> Iterator[KGFact]:
        return iter(self.facts)

    @staticmethod
    def fact_id(idx: int) -> str:
        return f"kg:{idx}"

    def one_hop(self, entity: str) -> list[int]:
        """Indices of facts mentioning ``entity`` as subject, object or qualifier object."""
        return list(self._by_term.get(entity, ()))

    def one_hop_facts(self, entity: str) -> list[KGFact]:
        return [self.facts[i] for i in self.one_hop(entity)]

    def type_facts(self, entity: str) -> list[int]:
        """instanceOf facts of ``entity``, plus occupation facts if it is a human."""
        own = [i for i in self._by_term.get(entity, ()) if self.facts[i].subject == entity]
        types = [i for i in own if self.facts[i].predicate == INSTANCE_OF]
        is_human = any(self.facts[i].object == HUMAN for i in types)
        if is_human:
            types += [i for i in own if self.facts[i].predicate == OCCUPATION]
        return sorted(types)

    def shortest_path(self, a: str, b: str) -> list[int]:
        """Fewest-facts path between two entities (BFS, ties by fact order)."""
        if a == b or a not in self._by_member or b not in self._by_member:
            return []
        parent: dict[str, tuple[str, int]] = {}
        seen = {a}
        queue = deque([a])
        while queue:
            cur = queue.popleft()
            for idx in self._by_member[cur]:
                for nxt in self.facts[idx].entity_members():
                    if nxt in seen:
                        continue
                    seen.add(nxt)
                    parent[nxt] = (cur, idx)
                    if nxt == b:
                        path = []
                        node = b
                        while node != a:
                            node, fidx = parent[node]
                            path.append(fidx)
                        return path[::-1]
                    queue.append(nxt)
        return []

    def dump_jsonl(self, fh: IO[str]) -> None:
        for fact in self.facts:
            fh.write(json.dumps(fact.to_record(), ensure_ascii=False) + "\n")
        for label in sorted(self.aliases):
            rec = {"label": label, "aliases": sorted(self.aliases[label])}
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


def load_kg_facts(lines: Iterable[str]) -> TripleStore:
    """Parse JSON-lines facts ``{s, p, o, o_kind, quals}``.

    Lines of the form ``{label, aliases}`` attach alias strings to a label
    (entities and predicates alike).
    """
    store = TripleStore()
    for lineno, line in enumerate(lines, 1):
        if not line.strip():
            continue
        try:
            rec = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FormatError(lineno, f"invalid JSON ({exc.msg})") from None
        if not isinstance(rec, dict):
            raise FormatError(lineno, "expected a JSON object")
        try:
            if "aliases" in rec and "s" not in rec:
                store.add_aliases(rec["label"], rec["aliases"])
            else:
                store.add(KGFact.from_record(rec))
        except (KeyError, ValueError, TypeError) as exc:
            raise FormatError(lineno, f"malformed fact: {exc}") from None
    return store


def one_hop_facts(store: TripleStore, entity: str) -> list[KGFact]:
    return store.one_hop_facts(entity)


def type_facts(store: TripleStore, entity: str) -> list[KGFact]:
    return [store.facts[i] for i in store.type_facts(entity)]


def kg_shortest_path(store: TripleStore, a: str, b: str) -> list[KGFact]:
    return [store.facts[i] for i in store.shortest_path(a, b)]
