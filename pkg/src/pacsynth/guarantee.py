"""Two-phase synthesis loop that draws exactly enough examples to generalize.

The sampling phase keeps drawing while the consistent-space size justifies
it, under a monotone stopping function g; the validation phase then draws
the sample-complexity count for the final size and returns a consistent
program.  The loop is generic over any engine exposing
update_hypothesis / compute_size / pick_program / reset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Protocol, Sequence

from .dsl import Expr, component_size, condition_count, evaluate, pretty
from .oracle import Example, ExampleSource, RecordedSource

StoppingFunction = Callable[[int], int]


class EngineContractError(Exception):
    """The engine returned a program inconsistent with a drawn example."""


class SynthesisEngine(Protocol):
    def update_hypothesis(self, examples: Sequence[Example]) -> None: ...

    def compute_size(self) -> int: ...

    def pick_program(self) -> Expr | None: ...

    def reset(self) -> None: ...


@dataclass(frozen=True)
class GuaranteeParams:
    """Error tolerance, failure probability, and sampling-phase step size."""

    epsilon: float
    delta: float
    step_k: int = 1

    def __post_init__(self):
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        if not 0 < self.delta < 1:
            raise ValueError("delta must be in (0, 1)")
        if self.step_k < 1:
            raise ValueError("step_k must be at least 1")

    @property
    def step_within_optimality_bound(self) -> bool:
        """Whether step_k is small enough for the 2x replay-optimality check."""
        return self.step_k <= math.floor(math.log(1.0 / self.delta) / (2 * self.epsilon))


def ln_upper(count: int) -> float:
    """Certified upper bound on ln(count), within 1e-9 of the true value.

    math.log decomposes arbitrary-precision integers into mantissa and
    exponent, so its relative error is a few ulps; the added slack strictly
    covers that while overestimating, which only increases sample counts.
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    v = math.log(count)
    return v + abs(v) * 1e-12 + 1e-12


def sample_complexity(size: int, epsilon: float, delta: float) -> int:
    """Smallest integer strictly above (1/epsilon)(ln(size) + ln(1/delta)).

    A consistent pick after that many fresh i.i.d. examples has error at
    most epsilon with probability at least 1 - delta.  Overestimation is the
    safe direction, so the logarithms are certified upper bounds.
    """
    if size < 1:
        raise ValueError("size must be >= 1; an empty space has no guarantee")
    if not 0 < epsilon < 1 or not 0 < delta < 1:
        raise ValueError("epsilon and delta must be in (0, 1)")
    bound = (ln_upper(size) - math.log(delta) + 1e-9) / epsilon
    bound *= 1 + 1e-12
    return math.floor(bound) + 1


def default_g(size: int, epsilon: float, delta: float) -> int:
    """ceil(max(0, (1/epsilon)(ln(size) - ln(1/delta)))), the default threshold."""
    if size < 1:
        raise ValueError("size must be >= 1")
    if size <= 2**53:
        # Exact float conversion lets ln(size) - ln(1/delta) cancel cleanly
        # when size is at the delta boundary.
        val = math.log(size * delta)
    else:
        val = ln_upper(size) + math.log(delta)
    return max(0, math.ceil(val / epsilon))


def make_default_g(params: GuaranteeParams) -> StoppingFunction:
    return lambda size: default_g(size, params.epsilon, params.delta)


def constant_g(threshold: int) -> StoppingFunction:
    return lambda size: threshold


def scaled_default_g(params: GuaranteeParams, factor: float) -> StoppingFunction:
    return lambda size: math.ceil(factor * default_g(size, params.epsilon, params.delta))


@dataclass(frozen=True)
class Program:
    expr: Expr
    tier: int
    size: int
    text: str

    @classmethod
    def from_expr(cls, expr: Expr) -> "Program":
        return cls(expr, condition_count(expr), component_size(expr), pretty(expr))


@dataclass(frozen=True)
class TraceRow:
    iteration: int
    samples_seen: int
    tier: int
    size_upper: int
    threshold: int
    phase: str  # "sampling" or "validation"


@dataclass
class LoopState:
    tier: int
    examples: list[Example]
    threshold: int
    trace: list[TraceRow]

    @property
    def samples_seen(self) -> int:
        return len(self.examples)


@dataclass(frozen=True)
class SynthesisOutcome:
    result: Program | None
    total_samples: int
    validation_samples: int


def run_guaranteed(
    source: ExampleSource,
    engine: SynthesisEngine,
    params: GuaranteeParams,
    g: StoppingFunction | None = None,
    *,
    tier: int = 0,
    prior_examples: Sequence[Example] = (),
    trace: list[TraceRow] | None = None,
    iteration_offset: int = 0,
    check_consistency: bool = True,
) -> tuple[SynthesisOutcome, LoopState]:
    """Run the two-phase loop against one engine.

    Prior examples (replayed from a failed lower tier) condition the engine
    before any new draw and do not count toward this run's draw totals.
    total_samples counts every example drawn here, in both phases.
    """
    if g is None:
        g = make_default_g(params)
    trace = trace if trace is not None else []
    examples = list(prior_examples)
    engine.update_hypothesis(examples)
    size = engine.compute_size()
    state = LoopState(tier=tier, examples=examples, threshold=0, trace=trace)
    it = iteration_offset

    def record(phase: str, size_now: int, threshold: int) -> None:
        trace.append(TraceRow(it, len(examples), tier, size_now, threshold, phase))

    if size == 0:
        record("sampling", 0, 0)
        return SynthesisOutcome(None, 0, 0), state

    n = g(size)
    state.threshold = n
    record("sampling", size, n)
    drawn = 0
    while drawn <= n:
        it += 1
        examples.extend(source.draw(params.step_k))
        engine.update_hypothesis(examples)
        size = engine.compute_size()
        drawn += params.step_k
        if size == 0:
            record("sampling", 0, n)
            return SynthesisOutcome(None, drawn, 0), state
        n = min(n, drawn + g(size))
        state.threshold = n
        record("sampling", size, n)

    m = sample_complexity(size, params.epsilon, params.delta)
    examples.extend(source.draw(m))
    engine.update_hypothesis(examples)
    final_size = engine.compute_size()
    it += 1
    record("validation", final_size, n)
    if final_size == 0:
        return SynthesisOutcome(None, drawn + m, m), state
    expr = engine.pick_program()
    if expr is None:
        raise EngineContractError("engine reported a positive size but picked nothing")
    if check_consistency:
        for ex in examples:
            if evaluate(expr, ex.inputs) != ex.output:
                raise EngineContractError(
                    f"picked program {pretty(expr)} disagrees on a drawn example"
                )
    return SynthesisOutcome(Program.from_expr(expr), drawn + m, m), state


@dataclass
class TieredResult:
    outcome: SynthesisOutcome
    trace: list[TraceRow]
    examples: list[Example]
    tiers_run: int


def run_tiered(
    source: ExampleSource,
    engines: Sequence[SynthesisEngine],
    params: GuaranteeParams,
    *,
    check_consistency: bool = True,
) -> TieredResult:
    """Try increasingly expressive engines, splitting the failure budget.

    Each engine runs the full loop with failure probability delta/3 (a
    union bound over the at-most-three tiers).  Examples drawn by a failed
    tier are replayed into the next engine before it draws anything new;
    the next tier's validation set is drawn fresh after its own sampling
    phase settles the size.
    """
    if not engines:
        raise ValueError("at least one engine is required")
    tier_delta = params.delta / 3
    trace: list[TraceRow] = []
    carried: list[Example] = []
    total = 0
    offset = 0
    outcome = SynthesisOutcome(None, 0, 0)
    tiers_run = 0
    for tier, engine in enumerate(engines):
        tier_params = GuaranteeParams(params.epsilon, tier_delta, params.step_k)
        outcome, state = run_guaranteed(
            source,
            engine,
            tier_params,
            tier=tier,
            prior_examples=carried,
            trace=trace,
            iteration_offset=offset,
            check_consistency=check_consistency,
        )
        tiers_run += 1
        total += outcome.total_samples
        carried = list(state.examples)
        offset = trace[-1].iteration + 1 if trace else 0
        if outcome.result is not None:
            break
    return TieredResult(replace(outcome, total_samples=total), trace, carried, tiers_run)


def replay_with_g(
    recorded: Sequence[Example],
    engine: SynthesisEngine,
    params: GuaranteeParams,
    g_family: Sequence[StoppingFunction],
) -> list[int]:
    """Deterministically replay one example sequence under each stopping function.

    Reports the total sample count per function; used to confirm the
    default stays within twice the best tested choice.
    """
    if not g_family:
        raise ValueError("g_family must be non-empty")
    totals = []
    for g in g_family:
        engine.reset()
        outcome, _ = run_guaranteed(RecordedSource(recorded), engine, params, g=g)
        totals.append(outcome.total_samples)
    return totals


def check_monotone_trace(trace: Sequence[TraceRow]) -> list[str]:
    """Violation messages for size/threshold monotonicity within each tier."""
    problems = []
    last: dict[int, TraceRow] = {}
    for row in trace:
        prev = last.get(row.tier)
        if prev is not None:
            if row.size_upper > prev.size_upper:
                problems.append(
                    f"tier {row.tier}: size rose {prev.size_upper} -> {row.size_upper} "
                    f"at iteration {row.iteration}"
                )
            if row.threshold > prev.threshold:
                problems.append(
                    f"tier {row.tier}: threshold rose {prev.threshold} -> {row.threshold} "
                    f"at iteration {row.iteration}"
                )
        last[row.tier] = row
    return problems


def check_termination_envelope(trace: Sequence[TraceRow], step_k: int) -> list[str]:
    """Check n_p < s_p <= n_0 + k for every tier whose sampling phase completed."""
    problems = []
    by_tier: dict[int, list[TraceRow]] = {}
    for row in trace:
        by_tier.setdefault(row.tier, []).append(row)
    for tier, rows in by_tier.items():
        sampling = [r for r in rows if r.phase == "sampling"]
        finished = any(r.phase == "validation" for r in rows)
        if not finished or len(sampling) < 2:
            continue
        base = sampling[0].samples_seen
        n0 = sampling[0].threshold
        last = sampling[-1]
        s_p = last.samples_seen - base
        if not (last.threshold < s_p <= n0 + step_k):
            problems.append(
                f"tier {tier}: expected n_p < s_p <= n_0 + k, "
                f"got n_p={last.threshold} s_p={s_p} n_0={n0} k={step_k}"
            )
    return problems
