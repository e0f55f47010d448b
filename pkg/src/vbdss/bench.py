"""Query benchmark harness.

Runs each query against each dataset separately and against the union of
all datasets, timing ``execute`` only (parsing and union construction are
setup). Times are medians of >= 5 warm repetitions on a monotonic clock.
The headline property: querying the combined graph once is cheaper than
paying per-run overhead for every dataset separately, so for every query
``combined <= sum(separate)`` on the shipped datasets.

The same harness doubles as the kernel-backend comparison: pass
``backend="pure"`` / ``"native"`` to rebuild the datasets on a specific
TripleIndex implementation and time the identical workload.
"""

from __future__ import annotations

import gc
import statistics
import time
from dataclasses import dataclass, field

from ._core import available_backends, get_backend
from .query import Query, execute
from .store import Graph


@dataclass
class BenchRow:
    query_id: str
    dataset_id: str
    median_seconds: float
    repetitions: int
    rows_returned: int


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    backend: str = ""

    def row(self, query_id: str, dataset_id: str) -> BenchRow:
        for r in self.rows:
            if r.query_id == query_id and r.dataset_id == dataset_id:
                return r
        raise KeyError((query_id, dataset_id))

    def query_ids(self) -> list[str]:
        seen: list[str] = []
        for r in self.rows:
            if r.query_id not in seen:
                seen.append(r.query_id)
        return seen

    def dataset_ids(self) -> list[str]:
        seen: list[str] = []
        for r in self.rows:
            if r.dataset_id not in seen and r.dataset_id != "combined":
                seen.append(r.dataset_id)
        return seen

    def separate_sum(self, query_id: str) -> float:
        return sum(self.row(query_id, d).median_seconds for d in self.dataset_ids())

    def to_tsv(self) -> str:
        """Delimiter-separated table, one row per (query, dataset) plus the
        per-query sum-of-separate row for plotting."""
        lines = ["query\tdataset\tmedian_seconds\trepetitions\trows"]
        for r in self.rows:
            lines.append(f"{r.query_id}\t{r.dataset_id}\t{r.median_seconds:.6f}\t{r.repetitions}\t{r.rows_returned}")
        for qid in self.query_ids():
            lines.append(f"{qid}\tsum_of_separate\t{self.separate_sum(qid):.6f}\t-\t-")
        return "\n".join(lines) + "\n"

    def render(self) -> str:
        datasets = self.dataset_ids()
        header = ["query"] + datasets + ["sum_of_separate", "combined"]
        out = ["\t".join(header)]
        for qid in self.query_ids():
            cells = [qid]
            cells += [f"{self.row(qid, d).median_seconds * 1000:.3f}ms" for d in datasets]
            cells.append(f"{self.separate_sum(qid) * 1000:.3f}ms")
            cells.append(f"{self.row(qid, 'combined').median_seconds * 1000:.3f}ms")
            out.append("\t".join(cells))
        if self.backend:
            out.append(f"(kernel backend: {self.backend})")
        return "\n".join(out)


def _time_query(query: Query, targets: list[tuple[str, Graph]], reps: int) -> dict[str, tuple[float, int]]:
    """Median wall time and row count per target graph.

    Repetitions are interleaved across the targets (round robin) so a
    transient system stall inflates one repetition everywhere instead of
    one target's whole sample; the GC is paused while sampling.
    """
    rows = {name: len(execute(query, graph)) for name, graph in targets}  # warm-up
    samples: dict[str, list[float]] = {name: [] for name, _ in targets}
    gc_was_enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(reps):
            for name, graph in targets:
                start = time.perf_counter()
                execute(query, graph)
                samples[name].append(time.perf_counter() - start)
    finally:
        if gc_was_enabled:
            gc.enable()
    return {name: (statistics.median(samples[name]), rows[name]) for name, _ in targets}


def _rebuild_on_backend(graphs: dict[str, Graph], backend_name: str) -> dict[str, Graph]:
    backend = get_backend(backend_name)
    out = {}
    for name, g in graphs.items():
        copy = Graph(backend=backend)
        for ids in g.triple_ids():
            copy.insert_ids(ids)
        out[name] = copy
    return out


def bench(
    queries: dict[str, Query],
    datasets: dict[str, Graph],
    reps: int = 7,
    *,
    backend: str | None = None,
) -> BenchReport:
    """Median execute() time per (query, dataset) and per (query, combined)."""
    if reps < 5:
        raise ValueError("bench requires at least 5 repetitions")
    if backend is not None:
        datasets = _rebuild_on_backend(datasets, backend)
    combined = Graph(backend=get_backend(backend) if backend else None)
    for g in datasets.values():
        for ids in g.triple_ids():
            combined.insert_ids(ids)
    report = BenchReport(backend=backend or "default")
    targets = list(datasets.items()) + [("combined", combined)]
    for qid, query in queries.items():
        for did, (median, nrows) in _time_query(query, targets, reps).items():
            report.rows.append(BenchRow(qid, did, median, reps, nrows))
    return report


def bench_backends(queries: dict[str, Query], datasets: dict[str, Graph], reps: int = 7) -> dict[str, BenchReport]:
    """One report per available kernel backend, identical workload."""
    return {name: bench(queries, datasets, reps, backend=name) for name in sorted(available_backends())}
