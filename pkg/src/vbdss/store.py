"""In-memory indexed triple store.

A Graph is a set of triples held as interned integer ids inside a
three-ordering index (see ``vbdss._core``). Set semantics throughout:
inserting an existing triple is a no-op, matching never yields duplicates.

Concurrency: a Graph is mutable while it is private to one writer; once
shared it must be treated as frozen (every consumer here follows that
rule, e.g. the rule engine copies its input before deriving into it).
"""

from __future__ import annotations

from typing import Iterable, Iterator

from ._core import WILD, TripleIndex
from .errors import TripleError
from .terms import Iri, Literal, Term, Triple, intern_term, intern_triple, triple_of


class Graph:
    def __init__(self, triples: Iterable[Triple] = (), *, backend=None):
        self._index = (backend.TripleIndex if backend else TripleIndex)()
        for t in triples:
            self.insert(t)

    # -- basic set operations ------------------------------------------------

    def insert(self, t: Triple) -> bool:
        """Add a triple; True iff it was not present before."""
        if not isinstance(t, Triple):
            raise TripleError(f"expected a Triple, got {type(t).__name__}")
        return self._index.add(*intern_triple(t))

    def remove(self, t: Triple) -> bool:
        """Remove a triple; True iff it was present."""
        return self._index.discard(*intern_triple(t))

    def __contains__(self, t: Triple) -> bool:
        return self._index.contains(*intern_triple(t))

    def __len__(self) -> int:
        return len(self._index)

    def __iter__(self) -> Iterator[Triple]:
        for ids in self._index.triples():
            yield triple_of(ids)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.triple_ids() == other.triple_ids()

    def match(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> set[Triple]:
        """Triples agreeing with the pattern on every non-None position."""
        return {triple_of(ids) for ids in self._index.match(*self._encode_pattern(s, p, o))}

    def count(self, s: Term | None = None, p: Term | None = None, o: Term | None = None) -> int:
        return self._index.count(*self._encode_pattern(s, p, o))

    def copy(self) -> "Graph":
        g = Graph()
        for ids in self._index.triples():
            g._index.add(*ids)
        return g

    def union(self, other: "Graph") -> "Graph":
        """Deduplicating union; commutative, leaves both inputs untouched."""
        g = self.copy()
        for ids in other._index.triples():
            g._index.add(*ids)
        return g

    def __or__(self, other: "Graph") -> "Graph":
        return self.union(other)

    # -- integer-id plane (rule/query engines join on these) ------------------

    def triple_ids(self) -> set[tuple[int, int, int]]:
        return set(self._index.triples())

    def insert_ids(self, ids: tuple[int, int, int]) -> bool:
        return self._index.add(*ids)

    def contains_ids(self, ids: tuple[int, int, int]) -> bool:
        return self._index.contains(*ids)

    def match_ids(self, s: int = WILD, p: int = WILD, o: int = WILD) -> list[tuple[int, int, int]]:
        return self._index.match(s, p, o)

    def count_ids(self, s: int = WILD, p: int = WILD, o: int = WILD) -> int:
        return self._index.count(s, p, o)

    def _encode_pattern(self, s, p, o):
        ids = []
        for term in (s, p, o):
            if term is None:
                ids.append(WILD)
                continue
            if not isinstance(term, (Iri, Literal)):
                raise TripleError(f"pattern positions must be terms or None, got {term!r}")
            ids.append(intern_term(term))
        return tuple(ids)

    def check_index_consistency(self) -> None:
        """Verify the three orderings hold exactly the same triple set."""
        spo, pos, osp = self._index.index_views()
        from_spo = {(s, p, o) for s, by_p in spo.items() for p, objs in by_p.items() for o in objs}
        from_pos = {(s, p, o) for p, by_o in pos.items() for o, subs in by_o.items() for s in subs}
        from_osp = {(s, p, o) for o, by_s in osp.items() for s, preds in by_s.items() for p in preds}
        if not (from_spo == from_pos == from_osp):
            raise AssertionError("triple index orderings disagree")
        if len(from_spo) != len(self._index):
            raise AssertionError("triple index size drifted from content")

    def __repr__(self) -> str:
        return f"Graph({len(self)} triples)"


def graph_from_ids(ids: Iterable[tuple[int, int, int]]) -> Graph:
    g = Graph()
    for t in ids:
        g._index.add(*t)
    return g
