"""Enumerative synthesis engine exposed through the guarantee-loop protocol.

One engine instance is bound to a tier (0, 1, or 2 conditions).  Every
hypothesis update re-enumerates the straight-line table on the full example
list and re-clusters; counting bugs are subtle enough that the from-scratch
path is the reference semantics.
"""

from __future__ import annotations

from typing import Sequence

from .clustering import (
    BoolClusters,
    ClusterMaps,
    bool_clusters,
    cluster,
    tier_size,
    unify_pick,
)
from .dsl import ComponentSet, Expr, Sort, default_component_set
from .enumeration import DEFAULT_ENTRY_CAP, CountTable, enumerate_programs
from .oracle import Example, TaskSpec


class EnumerativeEngine:
    def __init__(
        self,
        components: ComponentSet,
        output_sort: Sort,
        max_size: int,
        tier: int,
        entry_cap: int = DEFAULT_ENTRY_CAP,
        literal_gamma: bool = False,
    ):
        self.components = components
        self.output_sort = output_sort
        self.max_size = max_size
        self.tier = tier
        self.entry_cap = entry_cap
        self.literal_gamma = literal_gamma
        self._table: CountTable | None = None
        self._maps: ClusterMaps | None = None
        self._bools: BoolClusters | None = None
        self._memo: dict = {}
        self.update_hypothesis([])

    def update_hypothesis(self, examples: Sequence[Example]) -> None:
        inputs = [ex.inputs for ex in examples]
        outputs = [ex.output for ex in examples]
        self._table = enumerate_programs(
            self.components, inputs, self.max_size, self.entry_cap
        )
        self._maps = cluster(self._table, outputs, self.output_sort)
        self._bools = bool_clusters(self._table)
        self._memo = {}

    def compute_size(self) -> int:
        assert self._maps is not None and self._bools is not None
        return tier_size(
            self._maps, self._bools, self.tier, self._memo, self.literal_gamma
        )

    def pick_program(self) -> Expr | None:
        assert self._maps is not None and self._bools is not None
        return unify_pick(self._maps, self._bools, self.tier)

    def reset(self) -> None:
        self.update_hypothesis([])

    @property
    def table(self) -> CountTable:
        assert self._table is not None
        return self._table


def component_set_for_task(task: TaskSpec) -> ComponentSet:
    return default_component_set(
        task.inputs, task.string_constants, task.int_constants, task.components
    )


def engines_for_task(
    task: TaskSpec, entry_cap: int = DEFAULT_ENTRY_CAP
) -> list[EnumerativeEngine]:
    """One engine per tier, 0 .. max_nesting, sharing the component set."""
    comps = component_set_for_task(task)
    return [
        EnumerativeEngine(comps, task.output_sort, task.max_size, tier, entry_cap)
        for tier in range(task.max_nesting + 1)
    ]


def tier_sizes(
    components: ComponentSet,
    output_sort: Sort,
    max_size: int,
    examples: Sequence[Example],
    max_tier: int = 2,
    entry_cap: int = DEFAULT_ENTRY_CAP,
) -> list[int]:
    """Consistent-space size per cumulative tier for a fixed example list."""
    table = enumerate_programs(
        components, [ex.inputs for ex in examples], max_size, entry_cap
    )
    maps = cluster(table, [ex.output for ex in examples], output_sort)
    bools = bool_clusters(table)
    memo: dict = {}
    return [tier_size(maps, bools, t, memo) for t in range(max_tier + 1)]


def synthesize_min_consistent(
    task: TaskSpec,
    examples: Sequence[Example],
    entry_cap: int = DEFAULT_ENTRY_CAP,
) -> Expr | None:
    """Fixed-budget baseline: minimal consistent program, no guarantee.

    Shares the enumeration and unification paths with the guaranteed loop;
    only the stopping logic is absent.
    """
    comps = component_set_for_task(task)
    table = enumerate_programs(
        comps, [ex.inputs for ex in examples], task.max_size, entry_cap
    )
    maps = cluster(table, [ex.output for ex in examples], task.output_sort)
    bools = bool_clusters(table)
    return unify_pick(maps, bools, task.max_nesting)
