"""Pure-Python kernels: triple index and bounded edit distance.

This is the fallback twin of the compiled module ``_native``; the two must
stay behaviourally identical. The index stores interned integer triples in
three nested-dict orderings (SPO, POS, OSP) so any bound/unbound pattern
resolves with dictionary probes instead of scans. ``-1`` is the wildcard.
"""

from __future__ import annotations

BACKEND = "pure"

WILD = -1


class TripleIndex:
    __slots__ = ("_spo", "_pos", "_osp", "_size", "_s_total", "_p_total", "_o_total")

    def __init__(self):
        self._spo: dict[int, dict[int, set[int]]] = {}
        self._pos: dict[int, dict[int, set[int]]] = {}
        self._osp: dict[int, dict[int, set[int]]] = {}
        # per-key totals so one-position counts are O(1)
        self._s_total: dict[int, int] = {}
        self._p_total: dict[int, int] = {}
        self._o_total: dict[int, int] = {}
        self._size = 0

    def __len__(self) -> int:
        return self._size

    def add(self, s: int, p: int, o: int) -> bool:
        objects = self._spo.setdefault(s, {}).setdefault(p, set())
        if o in objects:
            return False
        objects.add(o)
        self._pos.setdefault(p, {}).setdefault(o, set()).add(s)
        self._osp.setdefault(o, {}).setdefault(s, set()).add(p)
        self._s_total[s] = self._s_total.get(s, 0) + 1
        self._p_total[p] = self._p_total.get(p, 0) + 1
        self._o_total[o] = self._o_total.get(o, 0) + 1
        self._size += 1
        return True

    def discard(self, s: int, p: int, o: int) -> bool:
        try:
            objects = self._spo[s][p]
        except KeyError:
            return False
        if o not in objects:
            return False
        objects.remove(o)
        if not objects:
            del self._spo[s][p]
            if not self._spo[s]:
                del self._spo[s]
        subjects = self._pos[p][o]
        subjects.remove(s)
        if not subjects:
            del self._pos[p][o]
            if not self._pos[p]:
                del self._pos[p]
        predicates = self._osp[o][s]
        predicates.remove(p)
        if not predicates:
            del self._osp[o][s]
            if not self._osp[o]:
                del self._osp[o]
        for totals, key in ((self._s_total, s), (self._p_total, p), (self._o_total, o)):
            totals[key] -= 1
            if not totals[key]:
                del totals[key]
        self._size -= 1
        return True

    def contains(self, s: int, p: int, o: int) -> bool:
        try:
            return o in self._spo[s][p]
        except KeyError:
            return False

    def triples(self):
        for s, by_p in self._spo.items():
            for p, objects in by_p.items():
                for o in objects:
                    yield (s, p, o)

    def match(self, s: int, p: int, o: int) -> list[tuple[int, int, int]]:
        """All stored triples agreeing with the pattern on non-wildcard slots."""
        bs, bp, bo = s != WILD, p != WILD, o != WILD
        out: list[tuple[int, int, int]] = []
        if bs and bp and bo:
            if self.contains(s, p, o):
                out.append((s, p, o))
        elif bs and bp:
            for oo in self._spo.get(s, {}).get(p, ()):
                out.append((s, p, oo))
        elif bp and bo:
            for ss in self._pos.get(p, {}).get(o, ()):
                out.append((ss, p, o))
        elif bo and bs:
            for pp in self._osp.get(o, {}).get(s, ()):
                out.append((s, pp, o))
        elif bs:
            for pp, objects in self._spo.get(s, {}).items():
                for oo in objects:
                    out.append((s, pp, oo))
        elif bp:
            for oo, subjects in self._pos.get(p, {}).items():
                for ss in subjects:
                    out.append((ss, p, oo))
        elif bo:
            for ss, predicates in self._osp.get(o, {}).items():
                for pp in predicates:
                    out.append((ss, pp, o))
        else:
            out.extend(self.triples())
        return out

    def count(self, s: int, p: int, o: int) -> int:
        """Exact match cardinality, computed without materialising triples."""
        bs, bp, bo = s != WILD, p != WILD, o != WILD
        if bs and bp and bo:
            return 1 if self.contains(s, p, o) else 0
        if bs and bp:
            return len(self._spo.get(s, {}).get(p, ()))
        if bp and bo:
            return len(self._pos.get(p, {}).get(o, ()))
        if bo and bs:
            return len(self._osp.get(o, {}).get(s, ()))
        if bs:
            return self._s_total.get(s, 0)
        if bp:
            return self._p_total.get(p, 0)
        if bo:
            return self._o_total.get(o, 0)
        return self._size

    def index_views(self):
        """The three orderings, exposed for cross-index consistency checks."""
        return self._spo, self._pos, self._osp


def bounded_levenshtein(a: str, b: str, limit: int) -> int:
    """Levenshtein distance of a and b, or limit + 1 once it provably exceeds limit.

    Unit costs, banded DP: only the diagonal band of width 2*limit + 1 is
    evaluated, so dictionary-wide candidate scans stay cheap.
    """
    la, lb = len(a), len(b)
    if abs(la - lb) > limit:
        return limit + 1
    if la == 0:
        return lb
    if lb == 0:
        return la
    big = limit + 1
    prev = [min(j, big) for j in range(lb + 1)]
    cur = [0] * (lb + 1)
    for i in range(1, la + 1):
        cur[0] = min(i, big)
        lo = max(1, i - limit)
        hi = min(lb, i + limit)
        if lo > 1:
            cur[lo - 1] = big
        ca = a[i - 1]
        row_min = cur[0] if lo == 1 else big
        for j in range(lo, hi + 1):
            cost = 0 if ca == b[j - 1] else 1
            best = prev[j - 1] + cost
            up = prev[j] + 1
            left = cur[j - 1] + 1
            if up < best:
                best = up
            if left < best:
                best = left
            if best > big:
                best = big
            cur[j] = best
            if best < row_min:
                row_min = best
        if hi < lb:
            cur[hi + 1 :] = [big] * (lb - hi)
        if row_min > limit:
            return big
        prev, cur = cur, prev
    return prev[lb] if prev[lb] <= limit else big
