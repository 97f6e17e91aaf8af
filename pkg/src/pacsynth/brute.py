"""Exhaustive program materialization for small instances.

Every straight-line and conditional program (else-only nesting, at most two
conditions) up to small size bounds is built explicitly and evaluated.  The
resulting exact counts are the reference for the table-based counting
machinery and back the ``verify-counts`` CLI subcommand.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterator

from .dsl import App, ComponentSet, Env, Expr, If, Sort, Value, evaluate, pretty
from .enumeration import _compositions

BRUTE_MAX_SIZE = 6
BRUTE_MAX_NESTING = 2
DEFAULT_PROGRAM_CAP = 10_000_000


class BruteCapacityError(Exception):
    def __init__(self, estimate: int, cap: int):
        super().__init__(f"estimated {estimate} programs exceeds cap {cap}")
        self.estimate = estimate


@dataclass
class BruteConfig:
    components: ComponentSet
    output_sort: Sort
    max_size: int
    max_nesting: int = 0
    examples: list[Env] = field(default_factory=list)
    program_cap: int = DEFAULT_PROGRAM_CAP
    domain: list[Env] | None = None

    def __post_init__(self):
        if not 1 <= self.max_size <= BRUTE_MAX_SIZE:
            raise ValueError(f"max_size must be in 1..{BRUTE_MAX_SIZE}")
        if not 0 <= self.max_nesting <= BRUTE_MAX_NESTING:
            raise ValueError(f"max_nesting must be in 0..{BRUTE_MAX_NESTING}")
        est = estimate_total(self)
        if est > self.program_cap:
            raise BruteCapacityError(est, self.program_cap)


def _size_counts(components: ComponentSet, max_size: int) -> dict[Sort, list[int]]:
    """Syntactic program counts per sort and exact size, no evaluation."""
    n = {sort: [0] * (max_size + 1) for sort in Sort}
    for leaf in components.leaves:
        n[leaf.sort][1] += 1
    for t in range(2, max_size + 1):
        for comp in components.functions:
            for split in _compositions(t - 1, comp.arity):
                prod = 1
                for j, tj in enumerate(split):
                    prod *= n[comp.arg_sorts[j]][tj]
                n[comp.result_sort][t] += prod
    return n


def estimate_total(config: BruteConfig) -> int:
    """Programs of all tier shapes, computed from the size recurrence."""
    n = _size_counts(config.components, config.max_size)
    n_out = sum(n[config.output_sort][1:])
    n_bool = sum(n[Sort.BOOL][1:])
    total = n_out
    if config.max_nesting >= 1:
        total += n_bool * n_out * n_out
    if config.max_nesting >= 2:
        total += n_bool * n_bool * n_out * n_out * n_out
    return total


def straight_line_terms(
    components: ComponentSet, sort: Sort, max_size: int
) -> list[list[Expr]]:
    """Terms of the sort indexed by exact component size (index 0 empty)."""
    by_size: dict[Sort, list[list[Expr]]] = {
        s: [[] for _ in range(max_size + 1)] for s in Sort
    }
    for leaf in components.leaves:
        by_size[leaf.sort][1].append(leaf)
    for t in range(2, max_size + 1):
        for comp in components.functions:
            for split in _compositions(t - 1, comp.arity):
                pools = [by_size[comp.arg_sorts[j]][split[j]] for j in range(comp.arity)]
                if any(not p for p in pools):
                    continue
                for args in product(*pools):
                    by_size[comp.result_sort][t].append(App(comp, tuple(args)))
    return by_size[sort]


def enumerate_all(config: BruteConfig) -> list[Expr]:
    """Every syntactically distinct program of the configured tier shapes."""
    return list(iter_programs(config))


def iter_programs(config: BruteConfig) -> Iterator[Expr]:
    comps, max_size = config.components, config.max_size
    by_size: dict[Sort, list[list[Expr]]] = {}
    for sort in Sort:
        by_size[sort] = straight_line_terms(comps, sort, max_size)
    flat_out = [e for bucket in by_size[config.output_sort][1:] for e in bucket]
    flat_bool = [e for bucket in by_size[Sort.BOOL][1:] for e in bucket]
    yield from flat_out
    if config.max_nesting >= 1:
        for cond, then, orelse in product(flat_bool, flat_out, flat_out):
            yield If(cond, then, orelse)
    if config.max_nesting >= 2:
        for c1, p1, c2, p2, p3 in product(
            flat_bool, flat_out, flat_bool, flat_out, flat_out
        ):
            yield If(c1, p1, If(c2, p2, p3))


@dataclass
class BruteCounts:
    value_counts: dict[Sort, dict[tuple[tuple, int], int]]
    consistency_counts: dict[tuple[bool, ...], int]
    tier_totals: list[int]
    semantic_tier_totals: list[int] | None


def exact_counts(config: BruteConfig, outputs: list[Value]) -> BruteCounts:
    """Direct-evaluation counts: the reference for all table-based counting.

    ``tier_totals[i]`` is the number of consistent programs with at most
    ``i`` conditions.  When a finite input domain is configured, programs
    are additionally deduplicated by their behavior on the whole domain.
    """
    comps, max_size = config.components, config.max_size
    value_counts: dict[Sort, dict[tuple[tuple, int], int]] = {s: {} for s in Sort}
    by_size: dict[Sort, list[list[Expr]]] = {}
    for sort in Sort:
        by_size[sort] = straight_line_terms(comps, sort, max_size)
        for t in range(1, max_size + 1):
            for e in by_size[sort][t]:
                vec = tuple(evaluate(e, env) for env in config.examples)
                key = (vec, t)
                value_counts[sort][key] = value_counts[sort].get(key, 0) + 1

    consistency_counts: dict[tuple[bool, ...], int] = {}
    flat_out = [e for bucket in by_size[config.output_sort][1:] for e in bucket]
    for e in flat_out:
        c = tuple(
            evaluate(e, env) == o for env, o in zip(config.examples, outputs)
        )
        consistency_counts[c] = consistency_counts.get(c, 0) + 1

    def consistent(e: Expr) -> bool:
        return all(
            evaluate(e, env) == o for env, o in zip(config.examples, outputs)
        )

    behaviors: list[set[tuple]] = [set() for _ in range(config.max_nesting + 1)]

    def behavior(e: Expr) -> tuple:
        return tuple(evaluate(e, env) for env in config.domain or [])

    tier_totals = []
    running = 0
    for e in flat_out:
        if consistent(e):
            running += 1
            if config.domain is not None:
                behaviors[0].add(behavior(e))
    tier_totals.append(running)

    flat_bool = [e for bucket in by_size[Sort.BOOL][1:] for e in bucket]
    if config.max_nesting >= 1:
        for cond, then, orelse in product(flat_bool, flat_out, flat_out):
            e = If(cond, then, orelse)
            if consistent(e):
                running += 1
                if config.domain is not None:
                    behaviors[1].add(behavior(e))
        tier_totals.append(running)
    if config.max_nesting >= 2:
        for c1, p1, c2, p2, p3 in product(
            flat_bool, flat_out, flat_bool, flat_out, flat_out
        ):
            e = If(c1, p1, If(c2, p2, p3))
            if consistent(e):
                running += 1
                if config.domain is not None:
                    behaviors[2].add(behavior(e))
        tier_totals.append(running)

    semantic: list[int] | None = None
    if config.domain is not None:
        semantic = []
        seen: set[tuple] = set()
        for i in range(config.max_nesting + 1):
            seen |= behaviors[i]
            semantic.append(len(seen))
    return BruteCounts(value_counts, consistency_counts, tier_totals, semantic)


def assert_no_duplicates(programs: list[Expr]) -> None:
    texts = [pretty(e) for e in programs]
    if len(set(texts)) != len(texts):
        raise AssertionError("duplicate programs in brute enumeration")
