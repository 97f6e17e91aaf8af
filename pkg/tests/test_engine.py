"""Engine protocol tests: sizes, monotone updates, picks, baseline synthesis."""

from pacsynth.dsl import FUNCTIONS, ComponentSet, Lit, Sort, Var, evaluate
from pacsynth.engine import (
    EnumerativeEngine,
    engines_for_task,
    synthesize_min_consistent,
    tier_sizes,
)
from pacsynth.enumeration import enumerate_programs, total_count
from pacsynth.oracle import Example, TaskSpec, UniformStringConfig

X = Var("x", Sort.STRING)
SWAP_SET = ComponentSet((X, Lit("a"), Lit("b")), (FUNCTIONS["="],))
SWAP = [Example({"x": "a"}, "b"), Example({"x": "b"}, "a")]


def swap_task(**overrides):
    kwargs = dict(
        name="swap",
        inputs=[("x", Sort.STRING)],
        string_constants=["a", "b"],
        target_kind="dsl",
        target_value='(if (= x "a") "b" "a")',
        distribution=UniformStringConfig(1, 1, "ab", 0),
        max_size=3,
        max_nesting=1,
        components=["="],
    )
    kwargs.update(overrides)
    return TaskSpec(**kwargs)


class TestEngine:
    def test_initial_sizes_are_shape_totals(self):
        table = enumerate_programs(SWAP_SET, [], 3)
        n_str = total_count(table, Sort.STRING)
        n_bool = total_count(table, Sort.BOOL)
        e0 = EnumerativeEngine(SWAP_SET, Sort.STRING, 3, 0)
        e1 = EnumerativeEngine(SWAP_SET, Sort.STRING, 3, 1)
        assert e0.compute_size() == n_str
        assert e1.compute_size() == n_str + n_bool * n_str * n_str

    def test_update_shrinks_and_reset_restores(self):
        engine = EnumerativeEngine(SWAP_SET, Sort.STRING, 3, 1)
        initial = engine.compute_size()
        engine.update_hypothesis(SWAP[:1])
        after_one = engine.compute_size()
        engine.update_hypothesis(SWAP)
        after_two = engine.compute_size()
        assert initial >= after_one >= after_two == 4
        engine.reset()
        assert engine.compute_size() == initial

    def test_pick_is_consistent(self):
        engine = EnumerativeEngine(SWAP_SET, Sort.STRING, 3, 1)
        engine.update_hypothesis(SWAP)
        pick = engine.pick_program()
        for ex in SWAP:
            assert evaluate(pick, ex.inputs) == ex.output

    def test_tier_zero_engine_cannot_use_conditionals(self):
        engine = EnumerativeEngine(SWAP_SET, Sort.STRING, 3, 0)
        engine.update_hypothesis(SWAP)
        assert engine.compute_size() == 0
        assert engine.pick_program() is None

    def test_engines_for_task(self):
        engines = engines_for_task(swap_task())
        assert [e.tier for e in engines] == [0, 1]
        assert engines[0].max_size == 3


class TestTierSizes:
    def test_zero_examples_row(self):
        sizes = tier_sizes(SWAP_SET, Sort.STRING, 3, [], max_tier=2)
        table = enumerate_programs(SWAP_SET, [], 3)
        n_str = total_count(table, Sort.STRING)
        n_bool = total_count(table, Sort.BOOL)
        assert sizes == [
            n_str,
            n_str + n_bool * n_str**2,
            n_str + n_bool * n_str**2 + n_bool**2 * n_str**3,
        ]

    def test_swap_collapse(self):
        assert tier_sizes(SWAP_SET, Sort.STRING, 3, SWAP, max_tier=1) == [0, 4]


class TestBaseline:
    def test_picks_minimal_consistent(self):
        task = swap_task()
        expr = synthesize_min_consistent(task, SWAP)
        for ex in SWAP:
            assert evaluate(expr, ex.inputs) == ex.output

    def test_single_example_prefers_straight_line(self):
        task = swap_task()
        expr = synthesize_min_consistent(task, SWAP[:1])
        # a constant or the input already explains one example
        assert evaluate(expr, {"x": "a"}) == "b"

    def test_contradiction_yields_none(self):
        task = swap_task()
        bad = [Example({"x": "a"}, "b"), Example({"x": "a"}, "zzz")]
        assert synthesize_min_consistent(task, bad) is None


class TestIntSortedTarget:
    def test_end_to_end_integer_output(self):
        from pacsynth.guarantee import GuaranteeParams, run_tiered
        from pacsynth.oracle import OracleSource, held_out_error

        task = TaskSpec(
            name="strlen",
            inputs=[("x", Sort.STRING)],
            target_kind="dsl",
            target_value="(length x)",
            distribution=UniformStringConfig(1, 3, "ab", 0),
            max_size=3,
            max_nesting=1,
            components=["length", "="],
        )
        assert task.output_sort is Sort.INT
        result = run_tiered(
            OracleSource(task, 0), engines_for_task(task), GuaranteeParams(0.2, 0.1, 2)
        )
        assert result.outcome.result.text == "(length x)"
        err, _, exact = held_out_error(task, result.outcome.result.expr)
        assert exact and err == 0
