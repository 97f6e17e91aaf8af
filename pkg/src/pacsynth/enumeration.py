"""Bottom-up enumeration of straight-line programs by component size.

Programs with identical outputs on the current example inputs collapse into
one table entry per size; exact per-(value vector, size) counts are kept as
arbitrary-precision integers, with one representative program retained per
entry.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product

from .dsl import App, ComponentSet, Env, Expr, Sort, evaluate

DEFAULT_ENTRY_CAP = 2_000_000


class CapacityError(Exception):
    """Distinct (value vector, size) entries exceeded the configured cap."""


@dataclass
class CountTable:
    """Counts and representatives for straight-line programs up to max_size.

    ``counts[sort][t]`` maps a value vector (tuple of outputs, one per
    example input) to the number of syntactically distinct programs of
    component size exactly ``t`` producing it.
    """

    components: ComponentSet
    examples: list[Env]
    max_size: int
    entry_cap: int = DEFAULT_ENTRY_CAP
    counts: dict[Sort, list[dict[tuple, int]]] = field(default_factory=dict)
    reprs: dict[Sort, list[dict[tuple, Expr]]] = field(default_factory=dict)

    def count(self, sort: Sort, vector: tuple, size: int) -> int:
        return self.counts[sort][size].get(vector, 0)

    def representative(self, sort: Sort, vector: tuple, size: int) -> Expr:
        return self.reprs[sort][size][vector]

    def entries(self, sort: Sort):
        """Yield (vector, size, count) for every stored entry of the sort."""
        for t in range(1, self.max_size + 1):
            for vec, n in self.counts[sort][t].items():
                yield vec, t, n


def _vector(e: Expr, examples: list[Env]) -> tuple:
    return tuple(evaluate(e, env) for env in examples)


def enumerate_programs(
    components: ComponentSet,
    example_inputs: list[Env],
    max_size: int,
    entry_cap: int = DEFAULT_ENTRY_CAP,
) -> CountTable:
    """Enumerate all straight-line programs of component size 1..max_size.

    Size 1 holds input and constant leaves; size t > 1 composes every
    function component over argument entries whose sizes sum to t - 1,
    multiplying argument counts.  With zero examples every program of a
    sort shares the empty value vector.
    """
    if max_size < 1:
        raise ValueError("max_size must be at least 1")
    table = CountTable(components, list(example_inputs), max_size, entry_cap)
    for sort in Sort:
        table.counts[sort] = [dict() for _ in range(max_size + 1)]
        table.reprs[sort] = [dict() for _ in range(max_size + 1)]
    entries = 0

    def add(sort: Sort, vec: tuple, size: int, n: int, rep: Expr) -> None:
        nonlocal entries
        bucket = table.counts[sort][size]
        if vec in bucket:
            bucket[vec] += n
        else:
            bucket[vec] = n
            table.reprs[sort][size][vec] = rep
            entries += 1
            if entries > entry_cap:
                raise CapacityError(
                    f"more than {entry_cap} distinct (vector, size) entries; "
                    "raise the cap or shrink the task"
                )

    for leaf in components.leaves:
        add(leaf.sort, _vector(leaf, table.examples), 1, 1, leaf)

    n_ex = len(table.examples)
    for t in range(2, max_size + 1):
        for comp in components.functions:
            arity = comp.arity
            if arity == 0 or t - 1 < arity:
                continue
            for split in _compositions(t - 1, arity):
                pools = [
                    table.counts[comp.arg_sorts[j]][split[j]] for j in range(arity)
                ]
                if any(not p for p in pools):
                    continue
                rep_pools = [
                    table.reprs[comp.arg_sorts[j]][split[j]] for j in range(arity)
                ]
                for arg_vecs in product(*(list(p) for p in pools)):
                    n = 1
                    for j in range(arity):
                        n *= pools[j][arg_vecs[j]]
                    out = tuple(
                        comp.fn(*(arg_vecs[j][i] for j in range(arity)))
                        for i in range(n_ex)
                    )
                    if out in table.counts[comp.result_sort][t]:
                        table.counts[comp.result_sort][t][out] += n
                    else:
                        rep = App(comp, tuple(rep_pools[j][arg_vecs[j]] for j in range(arity)))
                        add(comp.result_sort, out, t, n, rep)
    return table


def _compositions(total: int, parts: int) -> list[tuple[int, ...]]:
    """All tuples of ``parts`` positive integers summing to ``total``."""
    if parts == 1:
        return [(total,)] if total >= 1 else []
    out = []
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            out.append((first,) + rest)
    return out


def total_count(table: CountTable, sort: Sort, max_size: int | None = None) -> int:
    """Total straight-line programs of the sort with size up to max_size."""
    limit = table.max_size if max_size is None else max_size
    return sum(
        n for t in range(1, limit + 1) for n in table.counts[sort][t].values()
    )


def extend_examples(table: CountTable, new_examples: list[Env]) -> CountTable:
    """Re-key the table over the extended example list.

    Counting from scratch is the reference semantics; this re-enumerates on
    the full list so merged vectors split exactly as a fresh run would.
    """
    if not new_examples:
        return table
    return enumerate_programs(
        table.components,
        table.examples + list(new_examples),
        table.max_size,
        table.entry_cap,
    )
