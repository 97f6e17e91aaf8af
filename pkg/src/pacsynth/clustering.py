"""Consistency-vector clustering and if-then-else unification counting.

A consistency vector records, per example, whether a program's output
matches the required output.  Counts are clustered per consistency vector,
and conditional programs (nesting only in the else branch, at most two
conditions) are counted through don't-care patterns without materializing
them.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dsl import Expr, If, Sort, Value, component_size, pretty
from .enumeration import CountTable, total_count

# Pattern entries: True means the example must match, False must mismatch,
# None is don't-care.
Consistency = tuple[bool, ...]
Pattern = tuple[bool | None, ...]

MAX_CONDITIONS = 2


@dataclass
class ClusterMaps:
    """Per-consistency-vector aggregation of the straight-line table."""

    n_examples: int
    count_by_consistency: dict[Consistency, int] = field(default_factory=dict)
    members: dict[Consistency, list[tuple[tuple, int]]] = field(default_factory=dict)
    rep_by_consistency: dict[Consistency, Expr] = field(default_factory=dict)
    rep_key: dict[Consistency, tuple[int, str]] = field(default_factory=dict)


@dataclass
class BoolClusters:
    """Condition programs grouped by their boolean value vector."""

    count_by_vector: dict[tuple[bool, ...], int] = field(default_factory=dict)
    rep_by_vector: dict[tuple[bool, ...], Expr] = field(default_factory=dict)
    rep_key: dict[tuple[bool, ...], tuple[int, str]] = field(default_factory=dict)


def cluster(table: CountTable, outputs: list[Value], output_sort: Sort) -> ClusterMaps:
    """Assign each (vector, size) entry its consistency vector and sum counts."""
    maps = ClusterMaps(n_examples=len(outputs))
    for vec, t, n in table.entries(output_sort):
        c = tuple(v == o for v, o in zip(vec, outputs))
        maps.count_by_consistency[c] = maps.count_by_consistency.get(c, 0) + n
        maps.members.setdefault(c, []).append((vec, t))
        rep = table.representative(output_sort, vec, t)
        key = (component_size(rep), pretty(rep))
        if c not in maps.rep_key or key < maps.rep_key[c]:
            maps.rep_key[c] = key
            maps.rep_by_consistency[c] = rep
    return maps


def bool_clusters(table: CountTable) -> BoolClusters:
    """Sum condition counts over sizes per boolean value vector."""
    out = BoolClusters()
    for vec, t, n in table.entries(Sort.BOOL):
        out.count_by_vector[vec] = out.count_by_vector.get(vec, 0) + n
        rep = table.representative(Sort.BOOL, vec, t)
        key = (component_size(rep), pretty(rep))
        if vec not in out.rep_key or key < out.rep_key[vec]:
            out.rep_key[vec] = key
            out.rep_by_vector[vec] = rep
    return out


def matches(c: Consistency, pattern: Pattern) -> bool:
    return all(p is None or p == ci for ci, p in zip(c, pattern))


def refine_then(pattern: Pattern, b: tuple[bool, ...], literal: bool = False) -> Pattern:
    """Pattern the then branch must satisfy under condition vector b.

    The refined form demands a match only where the condition holds AND the
    enclosing pattern demands one; the literal form ignores the enclosing
    pattern, as the coarser published rule does.
    """
    if literal:
        return tuple(True if bi else None for bi in b)
    return tuple(True if bi and p is True else None for bi, p in zip(b, pattern))


def refine_else(pattern: Pattern, b: tuple[bool, ...], literal: bool = False) -> Pattern:
    if literal:
        return tuple(True if not bi else None for bi in b)
    return tuple(True if (not bi) and p is True else None for bi, p in zip(b, pattern))


def pattern_count(
    maps: ClusterMaps,
    bools: BoolClusters,
    pattern: Pattern,
    conditions: int,
    memo: dict | None = None,
    literal_gamma: bool = False,
) -> int:
    """Count programs with exactly ``conditions`` conditions matching the pattern.

    Zero conditions sums the clustered straight-line counts over matching
    consistency vectors.  With conditions, every boolean value vector
    partitions the condition programs; the then branch is always
    condition-free and nesting recurses into the else branch only.
    """
    if conditions > MAX_CONDITIONS:
        raise ValueError("nesting beyond configured maximum")
    if memo is None:
        memo = {}
    key = (pattern, conditions, literal_gamma)
    if key in memo:
        return memo[key]
    if conditions == 0:
        total = sum(
            n for c, n in maps.count_by_consistency.items() if matches(c, pattern)
        )
    else:
        total = 0
        for b, n_cond in bools.count_by_vector.items():
            then_n = pattern_count(
                maps, bools, refine_then(pattern, b, literal_gamma), 0, memo, literal_gamma
            )
            if then_n == 0:
                continue
            else_n = pattern_count(
                maps, bools, refine_else(pattern, b, literal_gamma),
                conditions - 1, memo, literal_gamma,
            )
            total += then_n * else_n * n_cond
    memo[key] = total
    return total


def all_match_pattern(n_examples: int) -> Pattern:
    return (True,) * n_examples


def tier_size(
    maps: ClusterMaps,
    bools: BoolClusters,
    tier: int,
    memo: dict | None = None,
    literal_gamma: bool = False,
) -> int:
    """Consistent-program count for the cumulative space with up to ``tier`` conditions."""
    if memo is None:
        memo = {}
    goal = all_match_pattern(maps.n_examples)
    return sum(
        pattern_count(maps, bools, goal, i, memo, literal_gamma)
        for i in range(tier + 1)
    )


def _pick_for_pattern(
    maps: ClusterMaps,
    bools: BoolClusters,
    pattern: Pattern,
    conditions: int,
) -> tuple[tuple[int, int, str], Expr] | None:
    """Minimal (conditions used, size, text) program matching the pattern."""
    best: tuple[tuple[int, int, str], Expr] | None = None
    for c, key in sorted(maps.rep_key.items(), key=lambda kv: kv[1]):
        if maps.count_by_consistency.get(c, 0) and matches(c, pattern):
            cand = ((0, key[0], key[1]), maps.rep_by_consistency[c])
            if best is None or cand[0] < best[0]:
                best = cand
            break  # rep_key iteration is sorted; first match is minimal
    if conditions >= 1:
        for b in sorted(bools.count_by_vector):
            cond_rep = bools.rep_by_vector[b]
            then = _pick_for_pattern(maps, bools, refine_then(pattern, b), 0)
            if then is None:
                continue
            orelse = _pick_for_pattern(maps, bools, refine_else(pattern, b), conditions - 1)
            if orelse is None:
                continue
            expr = If(cond_rep, then[1], orelse[1])
            cand_key = (
                1 + orelse[0][0],
                component_size(expr),
                pretty(expr),
            )
            if best is None or cand_key < best[0]:
                best = (cand_key, expr)
    return best


def unify_pick(
    maps: ClusterMaps,
    bools: BoolClusters,
    tier: int,
) -> Expr | None:
    """Deterministic minimal consistent program using at most ``tier`` conditions.

    Assembled conditionals take the then branch exactly where the condition
    holds, so a then branch matching everywhere the condition holds and an
    else branch matching everywhere it fails yield a fully consistent
    program.  Returns None iff no consistent program exists.
    """
    goal = all_match_pattern(maps.n_examples)
    got = _pick_for_pattern(maps, bools, goal, min(tier, MAX_CONDITIONS))
    return None if got is None else got[1]


def straight_line_total(table: CountTable, sort: Sort) -> int:
    return total_count(table, sort)
