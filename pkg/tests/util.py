"""Shared test helpers: high-precision oracles, random instances, mock engines."""

from __future__ import annotations

import random
from decimal import Decimal, getcontext
from types import SimpleNamespace

from pacsynth.brute import BruteCapacityError, BruteConfig
from pacsynth.dsl import (
    FUNCTIONS,
    App,
    ComponentSet,
    Expr,
    Lit,
    Sort,
    Var,
    evaluate,
)
from pacsynth.oracle import Example

getcontext().prec = 60


def ln_decimal(x) -> Decimal:
    return Decimal(x).ln()


def smallest_int_strictly_above(value: Decimal) -> int:
    floor = int(value.to_integral_value(rounding="ROUND_FLOOR"))
    return floor + 1


def oracle_sample_complexity(size: int, epsilon: str, delta: str) -> int:
    """Independent high-precision evaluation of the sample-size formula."""
    val = (ln_decimal(size) + ln_decimal(Decimal(1) / Decimal(delta))) / Decimal(epsilon)
    return smallest_int_strictly_above(val)


def oracle_default_g(size: int, epsilon: str, delta: str) -> int:
    val = (ln_decimal(size) - ln_decimal(Decimal(1) / Decimal(delta))) / Decimal(epsilon)
    if val <= 0:
        return 0
    return int(val.to_integral_value(rounding="ROUND_CEILING"))


# Small alphabets keep value-vector collisions common, which is what makes
# counting instances interesting.
_INSTANCE_FUNCS = [
    "concat", "at", "replace", "contains", "=", "prefixof", "length", "<=",
    "suffixof", "substr",
]


_STRING_FUNCS = ["concat", "at", "replace", "substr"]
_BOOL_FUNCS = ["contains", "=", "prefixof", "suffixof", "<="]


def random_component_set(rng: random.Random) -> ComponentSet:
    leaves: list[Expr] = [Var("x", Sort.STRING)]
    if rng.random() < 0.3:
        leaves.append(Var("y", Sort.STRING))
    for c in rng.sample(["a", "b", ","], rng.randint(1, 2)):
        leaves.append(Lit(c))
    for i in range(rng.randint(0, 2)):
        leaves.append(Lit(i))
    names = set(rng.sample(_STRING_FUNCS, rng.randint(1, 2)))
    if rng.random() < 0.75:
        names.update(rng.sample(_BOOL_FUNCS, rng.randint(1, 2)))
    if rng.random() < 0.3:
        names.add(rng.choice(_INSTANCE_FUNCS))
    return ComponentSet(
        tuple(leaves), tuple(FUNCTIONS[n] for n in FUNCTIONS if n in names)
    )


def random_env(rng: random.Random, comps: ComponentSet) -> dict:
    env = {}
    for leaf in comps.leaves:
        if isinstance(leaf, Var):
            length = rng.randint(0, 3)
            env[leaf.name] = "".join(rng.choice("ab,") for _ in range(length))
    return env


def random_straight_expr(rng: random.Random, comps: ComponentSet, sort: Sort, budget: int):
    """A random well-sorted straight-line expression, or None if impossible."""
    from pacsynth.dsl import component_size

    leaves = comps.leaves_of(sort)
    funcs = [f for f in comps.functions if f.result_sort is sort]
    if budget <= 1 or not funcs or rng.random() < 0.4:
        return rng.choice(leaves) if leaves else None
    f = rng.choice(funcs)
    if budget - 1 < f.arity:
        return rng.choice(leaves) if leaves else None
    remaining = budget - 1
    args = []
    for i, arg_sort in enumerate(f.arg_sorts):
        slots_left = f.arity - i - 1
        sub_budget = rng.randint(1, max(1, remaining - slots_left))
        arg = random_straight_expr(rng, comps, arg_sort, sub_budget)
        if arg is None:
            return None
        args.append(arg)
        remaining -= component_size(arg)
        if remaining < slots_left:
            return rng.choice(leaves) if leaves else None
    return App(f, tuple(args))


def random_instance(rng: random.Random, max_nesting: int = 1, program_cap: int = 60_000):
    """A small counting instance with a feasible brute-force space.

    Outputs are half the time the trace of a real program (so fully
    consistent vectors exist) and half the time arbitrary strings.
    """
    while True:
        comps = random_component_set(rng)
        max_size = rng.randint(2, 5)
        n_examples = rng.randint(0, 3)
        envs = [random_env(rng, comps) for _ in range(n_examples)]
        try:
            config = BruteConfig(
                comps, Sort.STRING, max_size, max_nesting, envs,
                program_cap=program_cap,
            )
        except BruteCapacityError:
            continue
        if not comps.leaves_of(Sort.STRING):
            continue
        if rng.random() < 0.5:
            secret = random_straight_expr(rng, comps, Sort.STRING, max_size)
            if secret is None:
                continue
            outputs = [evaluate(secret, env) for env in envs]
        else:
            outputs = [
                "".join(rng.choice("ab,") for _ in range(rng.randint(0, 2)))
                for _ in envs
            ]
        return SimpleNamespace(
            comps=comps, max_size=max_size, nesting=max_nesting,
            envs=envs, outputs=outputs, config=config,
        )


class MockEngine:
    """Scripted engine: compute_size returns the next value in ``sizes``."""

    def __init__(self, sizes, pick: Expr | None = None):
        self._sizes = list(sizes)
        self._pick = pick if pick is not None else Lit("c")
        self._calls = 0
        self.update_calls: list[list[Example]] = []

    def update_hypothesis(self, examples):
        self.update_calls.append(list(examples))

    def compute_size(self) -> int:
        i = min(self._calls, len(self._sizes) - 1)
        self._calls += 1
        return self._sizes[i]

    def pick_program(self):
        return self._pick

    def reset(self):
        self._calls = 0
        self.update_calls = []


class ScaledSizeEngine:
    """Wraps another engine, inflating every reported size."""

    def __init__(self, inner, factor: int = 2):
        self.inner = inner
        self.factor = factor

    def update_hypothesis(self, examples):
        self.inner.update_hypothesis(examples)

    def compute_size(self) -> int:
        return self.inner.compute_size() * self.factor

    def pick_program(self):
        return self.inner.pick_program()

    def reset(self):
        self.inner.reset()


class ConstSource:
    """Endless oracle emitting the same (input, output) pair."""

    def __init__(self, env=None, output="c"):
        self.env = env if env is not None else {"x": "u"}
        self.output = output
        self.drawn = 0

    def draw(self, n):
        self.drawn += n
        return [Example(dict(self.env), self.output) for _ in range(n)]
