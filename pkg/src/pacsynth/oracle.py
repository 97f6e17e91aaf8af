"""Example oracles: task files, input distributions, and target execution.

Examples are i.i.d. draws from one of two built-in input distributions (a
uniform random-string sampler and a mutation fuzzer over seed strings), run
through either a built-in DSL target or an external command speaking a
line-oriented JSON protocol.
"""

from __future__ import annotations

import json
import queue
import random
import shlex
import string
import subprocess
import threading
from dataclasses import dataclass, field
from typing import Protocol, Sequence

from .dsl import Env, Expr, Sort, Value, evaluate, parse_expr

DEFAULT_CHARSET = string.ascii_uppercase + string.ascii_lowercase + string.digits + ",.-;|"
PRINTABLE_NO_WS = "".join(c for c in string.printable if not c.isspace())

EXTERNAL_TIMEOUT_S = 10.0


class OracleError(Exception):
    """Base class for oracle failures."""


class OracleExhausted(OracleError):
    """A finite replay source ran out of examples."""


class TaskError(OracleError):
    """Task file failed validation."""


class ProtocolError(OracleError):
    """External target sent a malformed response."""


class TargetTimeout(OracleError):
    """External target exceeded the per-example timeout."""


class TargetCrashed(OracleError):
    """External target exited or closed its stream mid-run."""


@dataclass(frozen=True)
class Example:
    inputs: Env
    output: Value


@dataclass(frozen=True)
class UniformStringConfig:
    """Random strings: length uniform in [min_len, max_len], whitespace boosted."""

    min_len: int = 8
    max_len: int = 16
    charset: str = DEFAULT_CHARSET
    whitespace_weight: int = 15

    def __post_init__(self):
        if not 0 <= self.min_len <= self.max_len:
            raise TaskError("uniform distribution requires 0 <= min_len <= max_len")
        if not self.charset:
            raise TaskError("uniform distribution requires a non-empty charset")
        if self.whitespace_weight < 0:
            raise TaskError("whitespace_weight must be non-negative")


@dataclass(frozen=True)
class MutationConfig:
    """One random insert-or-delete mutation of a uniformly chosen seed string."""

    max_insert_len: int = 10
    mutations: int = 1
    insert_probability: float = 0.5

    def __post_init__(self):
        if self.max_insert_len < 1 or self.mutations < 1:
            raise TaskError("mutation distribution requires positive sizes")
        if not 0 <= self.insert_probability <= 1:
            raise TaskError("insert_probability must be in [0, 1]")


DistributionConfig = UniformStringConfig | MutationConfig


@dataclass(frozen=True)
class ArgRelation:
    """How a dependent argument is derived from a designated string argument."""

    kind: str  # "substring_of" for strings, "int_bound_of" for integers
    of: str


@dataclass
class TaskSpec:
    name: str
    inputs: list[tuple[str, Sort]]
    string_constants: list[str] = field(default_factory=list)
    int_constants: list[int] = field(default_factory=list)
    target_kind: str = "dsl"
    target_value: str = ""
    distribution: DistributionConfig = field(default_factory=UniformStringConfig)
    relations: dict[str, ArgRelation] = field(default_factory=dict)
    max_size: int = 6
    max_nesting: int = 2
    epsilon: float = 0.05
    delta: float = 0.02
    step_k: int = 1
    seeds: list[str] = field(default_factory=list)
    components: list[str] | None = None

    def __post_init__(self):
        if not self.inputs:
            raise TaskError(f"task {self.name!r} has no inputs")
        if isinstance(self.distribution, MutationConfig) and not self.seeds:
            raise TaskError(f"task {self.name!r}: mutation distribution requires seeds")
        if self.target_kind not in ("dsl", "command"):
            raise TaskError(f"task {self.name!r}: unknown target kind {self.target_kind!r}")
        for arg, rel in self.relations.items():
            names = [n for n, _ in self.inputs]
            if arg not in names or rel.of not in names:
                raise TaskError(f"task {self.name!r}: relation names unknown argument")
        if self.target_kind == "dsl":
            # Parse now so signature mismatches surface at load time.
            self.target_expr: Expr | None = parse_expr(self.target_value, self.inputs)
        else:
            self.target_expr = None

    @property
    def output_sort(self) -> Sort:
        if self.target_expr is not None:
            return self.target_expr.sort
        return Sort.STRING


_SORTS = {"string": Sort.STRING, "int": Sort.INT}


def task_from_dict(doc: dict, name_hint: str = "") -> TaskSpec:
    """Build a TaskSpec from the JSON document structure, validating shape."""
    try:
        name = doc.get("name") or name_hint or "task"
        inputs = [
            (i["name"], _SORTS[i["sort"]]) for i in doc["inputs"]
        ]
        target = doc["target"]
        dist_doc = doc.get("distribution", {"kind": "uniform", "params": {}})
        params = dict(dist_doc.get("params", {}))
        relations = {
            arg: ArgRelation(rel["kind"], rel["of"])
            for arg, rel in params.pop("relations", {}).items()
        }
        kind = dist_doc.get("kind", "uniform")
        if kind == "uniform":
            dist: DistributionConfig = UniformStringConfig(**params)
        elif kind == "mutation":
            dist = MutationConfig(**params)
        else:
            raise TaskError(f"unknown distribution kind {kind!r}")
        limits = doc.get("limits", {})
        guarantee = doc.get("guarantee", {})
        return TaskSpec(
            name=name,
            inputs=inputs,
            string_constants=list(doc.get("string_constants", [])),
            int_constants=[int(i) for i in doc.get("int_constants", [])],
            target_kind=target["kind"],
            target_value=target["value"],
            distribution=dist,
            relations=relations,
            max_size=int(limits.get("max_size", 6)),
            max_nesting=int(limits.get("max_nesting", 2)),
            epsilon=float(guarantee.get("epsilon", 0.05)),
            delta=float(guarantee.get("delta", 0.02)),
            step_k=int(guarantee.get("k", 1)),
            seeds=list(doc.get("seeds", [])),
            components=doc.get("components"),
        )
    except TaskError:
        raise
    except (KeyError, TypeError, ValueError) as err:
        raise TaskError(f"invalid task document ({name_hint or 'task'}): {err}") from err


def load_task(path: str) -> TaskSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as err:
        raise TaskError(f"cannot read task file {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise TaskError(f"task file {path} is not valid JSON: {err}") from err
    return task_from_dict(doc, name_hint=path)


def _weighted_char(rng: random.Random, config: UniformStringConfig) -> str:
    population = config.charset + " "
    weights = [1] * len(config.charset) + [config.whitespace_weight]
    return rng.choices(population, weights=weights, k=1)[0]


def _uniform_string(rng: random.Random, config: UniformStringConfig) -> str:
    length = rng.randint(config.min_len, config.max_len)
    return "".join(_weighted_char(rng, config) for _ in range(length))


def _mutate(rng: random.Random, seed: str, config: MutationConfig) -> str:
    s = seed
    for _ in range(config.mutations):
        insert = rng.random() < config.insert_probability or not s
        if insert:
            n = rng.randint(1, config.max_insert_len)
            chunk = "".join(rng.choice(PRINTABLE_NO_WS) for _ in range(n))
            pos = rng.randint(0, len(s))
            s = s[:pos] + chunk + s[pos:]
        else:
            pos = rng.randrange(len(s))
            s = s[:pos] + s[pos + 1 :]
    return s


def sample_input(task: TaskSpec, rng: random.Random) -> Env:
    """Draw one input environment for the task's declared distribution.

    Independent string arguments come from the distribution; an argument
    declared as a substring of another is a uniform substring of that
    argument's sampled value; integer arguments are, with equal
    probability, bounded by a designated string argument's length or
    uniform in 1..999.
    """
    env: Env = {}
    pending: list[tuple[str, Sort]] = []
    for name, sort in task.inputs:
        if name in task.relations or sort is Sort.INT:
            pending.append((name, sort))
            continue
        if isinstance(task.distribution, UniformStringConfig):
            env[name] = _uniform_string(rng, task.distribution)
        else:
            env[name] = _mutate(rng, rng.choice(task.seeds), task.distribution)
    string_args = [n for n, s in task.inputs if s is Sort.STRING]
    for name, sort in pending:
        rel = task.relations.get(name)
        if sort is Sort.STRING:
            if rel is None or rel.kind != "substring_of":
                raise TaskError(f"string argument {name!r} needs a substring_of relation")
            base = str(env[rel.of])
            start = rng.randint(0, len(base))
            length = rng.randint(0, len(base) - start)
            env[name] = base[start : start + length]
        else:
            of = rel.of if rel is not None else (string_args[0] if string_args else None)
            if of is not None and rng.random() < 0.5:
                env[name] = rng.randint(0, len(str(env[of])))
            else:
                env[name] = rng.randint(1, 999)
    return {name: env[name] for name, _ in task.inputs}


class Target(Protocol):
    def run(self, env: Env) -> Value: ...

    def close(self) -> None: ...


class DslTarget:
    def __init__(self, expr: Expr):
        self.expr = expr

    def run(self, env: Env) -> Value:
        return evaluate(self.expr, env)

    def close(self) -> None:
        pass


class CommandTarget:
    """External target process speaking one JSON object per line.

    Request: ``{"inputs": {...}}``.  Response: ``{"output": ...}``.  The
    literal line ``exit`` asks the process to terminate.  Every request is
    subject to a 10 second timeout.
    """

    def __init__(self, command: str):
        self.command = command
        try:
            self._proc = subprocess.Popen(
                shlex.split(command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        except OSError as err:
            raise TargetCrashed(f"cannot start target {command!r}: {err}") from err
        self._lines: queue.Queue[str | None] = queue.Queue()
        self._reader = threading.Thread(target=self._pump, daemon=True)
        self._reader.start()

    def _pump(self):
        assert self._proc.stdout is not None
        for line in self._proc.stdout:
            self._lines.put(line)
        self._lines.put(None)

    def run(self, env: Env) -> Value:
        request = json.dumps({"inputs": env}, sort_keys=True)
        try:
            assert self._proc.stdin is not None
            self._proc.stdin.write(request + "\n")
            self._proc.stdin.flush()
        except (OSError, ValueError) as err:
            raise TargetCrashed(f"target rejected input {env!r}: {err}") from err
        try:
            line = self._lines.get(timeout=EXTERNAL_TIMEOUT_S)
        except queue.Empty:
            self._proc.kill()
            raise TargetTimeout(f"target timed out on input {env!r}") from None
        if line is None:
            code = self._proc.wait()
            raise TargetCrashed(f"target exited with status {code} on input {env!r}")
        try:
            doc = json.loads(line)
            return doc["output"]
        except (json.JSONDecodeError, TypeError, KeyError) as err:
            raise ProtocolError(
                f"malformed response {line.strip()!r} for input {env!r}"
            ) from err

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                assert self._proc.stdin is not None
                self._proc.stdin.write("exit\n")
                self._proc.stdin.flush()
            except (OSError, ValueError):
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()


def make_target(task: TaskSpec) -> Target:
    if task.target_kind == "dsl":
        assert task.target_expr is not None
        return DslTarget(task.target_expr)
    return CommandTarget(task.target_value)


def make_example(target: Target, env: Env) -> Example:
    return Example(dict(env), target.run(env))


class ExampleSource(Protocol):
    def draw(self, n: int) -> list[Example]: ...


class OracleSource:
    """i.i.d. examples for a task; (task, seed, label) determines the stream."""

    def __init__(self, task: TaskSpec, seed: int, label: str = "synthesis",
                 target: Target | None = None):
        self.task = task
        self.rng = random.Random(f"{task.name}:{seed}:{label}")
        self.target = target if target is not None else make_target(task)

    def draw(self, n: int) -> list[Example]:
        return [
            make_example(self.target, sample_input(self.task, self.rng))
            for _ in range(n)
        ]

    def close(self) -> None:
        self.target.close()


class RecordedSource:
    """Replays a fixed example list in order; raises when it runs dry."""

    def __init__(self, examples: Sequence[Example]):
        self._examples = list(examples)
        self._next = 0

    def draw(self, n: int) -> list[Example]:
        if self._next + n > len(self._examples):
            raise OracleExhausted(
                f"recorded source exhausted: wanted {n}, "
                f"{len(self._examples) - self._next} left"
            )
        out = self._examples[self._next : self._next + n]
        self._next += n
        return out

    @property
    def position(self) -> int:
        return self._next


def load_examples(path: str) -> list[Example]:
    """Read a JSONL example file: one {"inputs": ..., "output": ...} per line."""
    out = []
    try:
        with open(path, encoding="utf-8") as fh:
            for line_no, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    doc = json.loads(line)
                    out.append(Example(dict(doc["inputs"]), doc["output"]))
                except (json.JSONDecodeError, KeyError, TypeError) as err:
                    raise TaskError(f"{path}:{line_no}: bad example line: {err}") from err
    except OSError as err:
        raise TaskError(f"cannot read example file {path}: {err}") from err
    return out


def enumerate_domain(task: TaskSpec, cap: int = 200_000) -> list[tuple[Env, float]] | None:
    """Explicit (input, probability) pairs when the input space is small.

    Only uniform-string tasks without argument relations are enumerable:
    the domain is the product over arguments of all strings the sampler can
    emit.  Returns None when the space exceeds the cap or the distribution
    is not enumerable.
    """
    dist = task.distribution
    if not isinstance(dist, UniformStringConfig) or task.relations:
        return None
    if any(sort is not Sort.STRING for _, sort in task.inputs):
        return None
    alphabet = list(dist.charset) + ([" "] if dist.whitespace_weight > 0 else [])
    total_strings = sum(len(alphabet) ** l for l in range(dist.min_len, dist.max_len + 1))
    if total_strings ** len(task.inputs) > cap:
        return None
    weight_total = len(dist.charset) + dist.whitespace_weight
    char_p = {c: 1 / weight_total for c in dist.charset}
    if dist.whitespace_weight > 0:
        char_p[" "] = dist.whitespace_weight / weight_total
    n_lengths = dist.max_len - dist.min_len + 1

    def string_domain() -> list[tuple[str, float]]:
        out = []
        for length in range(dist.min_len, dist.max_len + 1):
            stack: list[tuple[str, float]] = [("", 1.0 / n_lengths)]
            for _ in range(length):
                stack = [(s + c, p * char_p[c]) for s, p in stack for c in alphabet]
            out.extend(stack)
        return out

    per_arg = string_domain()
    domain: list[tuple[Env, float]] = [({}, 1.0)]
    for name, _ in task.inputs:
        domain = [
            ({**env, name: s}, p * sp) for env, p in domain for s, sp in per_arg
        ]
    return domain


def held_out_error(
    task: TaskSpec,
    expr: Expr,
    n_samples: int = 10_000,
    seed: int = 0,
    target: Target | None = None,
) -> tuple[float, int, bool]:
    """Disagreement rate between expr and the target on unseen inputs.

    Exact (full-domain, probability-weighted) when the task's input space
    enumerates under the cap; otherwise estimated from n_samples fresh
    draws on an evaluation stream disjoint from synthesis draws.
    Returns (error, points_used, exact).
    """
    own_target = target is None
    if target is None:
        target = make_target(task)
    try:
        domain = enumerate_domain(task)
        if domain is not None:
            err = sum(
                p for env, p in domain if evaluate(expr, env) != target.run(env)
            )
            return err, len(domain), True
        rng = random.Random(f"{task.name}:{seed}:evaluation")
        bad = 0
        for _ in range(n_samples):
            env = sample_input(task, rng)
            if evaluate(expr, env) != target.run(env):
                bad += 1
        return bad / n_samples, n_samples, False
    finally:
        if own_target:
            target.close()
