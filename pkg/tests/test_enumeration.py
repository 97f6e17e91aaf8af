"""Count-table tests: hand-counted instances, incrementality, brute equivalence."""

import random

import pytest

from pacsynth.brute import exact_counts
from pacsynth.dsl import FUNCTIONS, ComponentSet, Lit, Sort, Var, evaluate
from pacsynth.enumeration import (
    CapacityError,
    enumerate_programs,
    extend_examples,
    total_count,
)
from util import random_instance

X = Var("x", Sort.STRING)
CONCAT_SET = ComponentSet((X, Lit("a")), (FUNCTIONS["concat"],))


class TestSixProgramInstance:
    # The full space at size <= 3 over {x, "a", concat} is: x, "a",
    # concat(x,x), concat(x,"a"), concat("a",x), concat("a","a").

    def test_counts_on_one_example(self):
        table = enumerate_programs(CONCAT_SET, [{"x": "a"}], 3)
        assert table.count(Sort.STRING, ("a",), 1) == 2
        assert table.count(Sort.STRING, ("aa",), 3) == 4
        assert total_count(table, Sort.STRING) == 6

    def test_zero_examples_single_empty_vector(self):
        table = enumerate_programs(CONCAT_SET, [], 3)
        assert table.count(Sort.STRING, (), 1) == 2
        assert table.count(Sort.STRING, (), 3) == 4
        assert total_count(table, Sort.STRING) == 6

    def test_single_input_leaf(self):
        table = enumerate_programs(
            ComponentSet((X,), ()), [{"x": "p"}, {"x": "q"}], 1
        )
        assert dict(table.counts[Sort.STRING][1]) == {("p", "q"): 1}

    def test_total_count_degenerate_tables(self):
        empty = enumerate_programs(ComponentSet((Lit(0),), ()), [], 2)
        assert total_count(empty, Sort.STRING) == 0
        one = enumerate_programs(ComponentSet((Lit("z"),), ()), [], 1)
        assert total_count(one, Sort.STRING) == 1


def tables_equal(a, b):
    for sort in Sort:
        if dict((k, dict(v)) for k, v in enumerate(a.counts[sort])) != dict(
            (k, dict(v)) for k, v in enumerate(b.counts[sort])
        ):
            return False
    return True


class TestExtendExamples:
    def test_extend_matches_scratch(self):
        base = enumerate_programs(CONCAT_SET, [{"x": "a"}], 3)
        extended = extend_examples(base, [{"x": "b"}])
        scratch = enumerate_programs(CONCAT_SET, [{"x": "a"}, {"x": "b"}], 3)
        assert tables_equal(extended, scratch)
        assert extended.examples == scratch.examples

    def test_extend_matches_scratch_random(self):
        rng = random.Random(5)
        for _ in range(25):
            inst = random_instance(rng, max_nesting=0)
            if not inst.envs:
                continue
            base = enumerate_programs(inst.comps, inst.envs[:-1], inst.max_size)
            assert tables_equal(
                extend_examples(base, inst.envs[-1:]),
                enumerate_programs(inst.comps, inst.envs, inst.max_size),
            )

    def test_extending_with_nothing_is_identity(self):
        table = enumerate_programs(CONCAT_SET, [{"x": "a"}], 3)
        assert extend_examples(table, []) is table

    def test_consistent_mass_never_grows(self):
        rng = random.Random(6)
        for _ in range(20):
            inst = random_instance(rng, max_nesting=0)
            if len(inst.envs) < 2:
                continue
            outputs = inst.outputs

            def consistent_mass(table, n_examples):
                return sum(
                    n
                    for vec, t, n in table.entries(Sort.STRING)
                    if all(vec[i] == outputs[i] for i in range(n_examples))
                )

            small = enumerate_programs(inst.comps, inst.envs[:1], inst.max_size)
            full = enumerate_programs(inst.comps, inst.envs, inst.max_size)
            assert consistent_mass(full, len(inst.envs)) <= consistent_mass(small, 1)


class TestAgainstBruteForce:
    def test_value_counts_match_exactly(self):
        rng = random.Random(9)
        for _ in range(40):
            inst = random_instance(rng, max_nesting=0)
            table = enumerate_programs(inst.comps, inst.envs, inst.max_size)
            brute = exact_counts(inst.config, inst.outputs)
            for sort in Sort:
                got = {
                    (vec, t): n for vec, t, n in table.entries(sort)
                }
                assert got == brute.value_counts[sort], f"sort {sort}"

    def test_count_conservation_across_examples(self):
        rng = random.Random(10)
        for _ in range(20):
            inst = random_instance(rng, max_nesting=0)
            with_examples = enumerate_programs(inst.comps, inst.envs, inst.max_size)
            without = enumerate_programs(inst.comps, [], inst.max_size)
            for sort in Sort:
                assert total_count(with_examples, sort) == total_count(without, sort)

    def test_representative_fidelity(self):
        rng = random.Random(11)
        for _ in range(20):
            inst = random_instance(rng, max_nesting=0)
            table = enumerate_programs(inst.comps, inst.envs, inst.max_size)
            for sort in Sort:
                for vec, t, _ in table.entries(sort):
                    rep = table.representative(sort, vec, t)
                    assert tuple(evaluate(rep, env) for env in inst.envs) == vec


class TestGuards:
    def test_zero_max_size_rejected(self):
        with pytest.raises(ValueError):
            enumerate_programs(CONCAT_SET, [], 0)

    def test_entry_cap_aborts_loudly(self):
        with pytest.raises(CapacityError):
            enumerate_programs(CONCAT_SET, [{"x": "a"}], 3, entry_cap=1)

    def test_missing_leaf_sort_is_empty_not_error(self):
        table = enumerate_programs(
            ComponentSet((X,), (FUNCTIONS["substr"],)), [{"x": "ab"}], 4
        )
        assert total_count(table, Sort.INT) == 0
        assert total_count(table, Sort.STRING) == 1  # substr never applicable

    def test_determinism(self):
        a = enumerate_programs(CONCAT_SET, [{"x": "a"}], 3)
        b = enumerate_programs(CONCAT_SET, [{"x": "a"}], 3)
        assert tables_equal(a, b)
        assert [
            (vec, t, id(None)) for vec, t, _ in a.entries(Sort.STRING)
        ] == [(vec, t, id(None)) for vec, t, _ in b.entries(Sort.STRING)]
