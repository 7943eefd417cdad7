import json
import math

import numpy as np
import pytest

from gknet import (
    JointPmf,
    SymbolSequence,
    UnknownVariableError,
    binary_entropy,
    conditional_entropy,
    entropy,
    is_markov_chain,
    is_strongly_typical,
    mutual_information,
    sample_iid,
)
from gknet.probability import dump_pmf, load_pmf, pmf_from_dict, pmf_to_dict

from helpers import WORKED, oracle_entropy, random_pmf


def fair_bits(relation="independent"):
    if relation == "independent":
        mass = {(a, b): 0.25 for a in "01" for b in "01"}
    else:  # identical
        mass = {(a, a): 0.5 for a in "01"}
    return JointPmf(("X", "Y"), {"X": ("0", "1"), "Y": ("0", "1")}, mass)


class TestConstruction:
    def test_zero_mass_tuples_are_omitted(self):
        pmf = JointPmf(("X",), {"X": ("a", "b")}, {("a",): 1.0, ("b",): 0.0})
        assert pmf.support == (("a",),)

    def test_mass_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum"):
            JointPmf(("X",), {"X": ("a", "b")}, {("a",): 0.6, ("b",): 0.5})

    def test_negative_mass_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            JointPmf(("X",), {"X": ("a", "b")}, {("a",): 1.2, ("b",): -0.2})

    def test_arity_and_alphabet_validated(self):
        with pytest.raises(ValueError, match="arity"):
            JointPmf(("X", "Y"), {"X": ("a",), "Y": ("b",)}, {("a",): 1.0})
        with pytest.raises(ValueError, match="alphabet"):
            JointPmf(("X",), {"X": ("a",)}, {("z",): 1.0})

    def test_duplicate_variables_rejected(self):
        with pytest.raises(ValueError):
            JointPmf(("X", "X"), {"X": ("a",)}, {("a", "a"): 1.0})

    def test_canonical_ordering(self):
        m1 = {("b", "1"): 0.5, ("a", "0"): 0.5}
        m2 = {("a", "0"): 0.5, ("b", "1"): 0.5}
        alpha = {"X": ("a", "b"), "Y": ("0", "1")}
        assert JointPmf(("X", "Y"), alpha, m1) == JointPmf(("X", "Y"), alpha, m2)


class TestEntropy:
    def test_worked_table(self, two_blocks):
        assert entropy(two_blocks, ("X", "Y")) == pytest.approx(WORKED["H_XY"], abs=1e-9)
        assert entropy(two_blocks, "X") == pytest.approx(WORKED["H_X"], abs=1e-9)
        assert entropy(two_blocks, "Y") == pytest.approx(WORKED["H_Y"], abs=1e-9)

    def test_uniform_four_symbols(self):
        pmf = JointPmf(("X",), {"X": tuple("abcd")}, {(s,): 0.25 for s in "abcd"})
        assert entropy(pmf, "X") == pytest.approx(2.0, abs=1e-12)

    def test_deterministic(self):
        pmf = JointPmf(("X",), {"X": ("a",)}, {("a",): 1.0})
        assert entropy(pmf, "X") == 0.0

    def test_unknown_variable(self, two_blocks):
        with pytest.raises(UnknownVariableError):
            entropy(two_blocks, "Z")


class TestConditionalEntropy:
    def test_worked_table(self, two_blocks):
        assert conditional_entropy(two_blocks, "X", "Y") == pytest.approx(
            WORKED["H_X_given_Y"], abs=1e-9
        )

    def test_independent_fair_bits(self):
        assert conditional_entropy(fair_bits(), "X", "Y") == pytest.approx(1.0, abs=1e-12)

    def test_identical_variables(self):
        assert conditional_entropy(fair_bits("identical"), "X", "Y") == 0.0

    def test_overlap_rejected(self, two_blocks):
        with pytest.raises(ValueError, match="overlap"):
            conditional_entropy(two_blocks, "X", ("X", "Y"))


class TestMutualInformation:
    def test_worked_table(self, two_blocks):
        assert mutual_information(two_blocks, "X", "Y") == pytest.approx(
            WORKED["I_XY"], abs=1e-9
        )

    def test_independent(self):
        assert mutual_information(fair_bits(), "X", "Y") == pytest.approx(0.0, abs=1e-12)

    def test_identical_uniform_three(self):
        pmf = JointPmf(
            ("X", "Y"),
            {"X": tuple("abc"), "Y": tuple("abc")},
            {(s, s): 1 / 3 for s in "abc"},
        )
        assert mutual_information(pmf, "X", "Y") == pytest.approx(math.log2(3), abs=1e-9)

    def test_overlap_rejected(self, two_blocks):
        with pytest.raises(ValueError):
            mutual_information(two_blocks, ("X", "Y"), "Y")


class TestMarkovChain:
    def test_constructed_chain(self):
        rng = np.random.default_rng(11)
        from helpers import random_chain_pmf

        for _ in range(10):
            pmf = random_chain_pmf(rng)
            assert is_markov_chain(pmf, ("X", "Y1", "Y2"))

    def test_copies_form_every_chain(self):
        mass = {(a, a, a): 0.5 for a in "01"}
        pmf = JointPmf(
            ("X", "Y", "Z"), {v: ("0", "1") for v in "XYZ"}, mass
        )
        assert is_markov_chain(pmf, ("Y", "X", "Z"))

    def test_xor_violates_chain(self):
        mass = {}
        for x in "01":
            for z in "01":
                y = str(int(x) ^ int(z))
                mass[(x, y, z)] = 0.25
        pmf = JointPmf(("X", "Y", "Z"), {v: ("0", "1") for v in "XYZ"}, mass)
        assert not is_markov_chain(pmf, ("X", "Y", "Z"))

    def test_needs_three_variables(self, two_blocks):
        with pytest.raises(ValueError):
            is_markov_chain(two_blocks, ("X", "Y"))


class TestSampling:
    def test_determinism(self, two_blocks):
        a = sample_iid(two_blocks, 5, seed=7)
        b = sample_iid(two_blocks, 5, seed=7)
        assert a == b

    def test_deterministic_pmf_repeats(self):
        pmf = JointPmf(("X", "Y"), {"X": ("a",), "Y": ("b",)}, {("a", "b"): 1.0})
        seqs = sample_iid(pmf, 3, seed=0)
        assert seqs["X"].symbols == ("a",) * 3
        assert seqs["Y"].symbols == ("b",) * 3

    def test_law_of_large_numbers(self, two_blocks):
        seqs = sample_iid(two_blocks, 100_000, seed=42)
        pairs = list(zip(seqs["X"].symbols, seqs["Y"].symbols))
        freq = pairs.count(("1", "1")) / len(pairs)
        assert abs(freq - 1 / 3) < 0.01

    def test_blocklength_positive(self, two_blocks):
        with pytest.raises(ValueError):
            sample_iid(two_blocks, 0, seed=1)


class TestStrongTypicality:
    def test_exact_match(self):
        seq = SymbolSequence("X", ("a",) * 5 + ("b",) * 5)
        assert is_strongly_typical(seq, {"a": 0.5, "b": 0.5}, 0.1)

    def test_skewed_counts_fail(self):
        seq = SymbolSequence("X", ("a",) * 8 + ("b",) * 2)
        assert not is_strongly_typical(seq, {"a": 0.5, "b": 0.5}, 0.1)

    def test_tight_epsilon(self):
        seq = SymbolSequence("X", ("a",) * 33 + ("b",) * 67)
        assert is_strongly_typical(seq, {"a": 1 / 3, "b": 2 / 3}, 0.02)

    def test_zero_mass_symbol_must_not_occur(self):
        seq = SymbolSequence("X", ("a", "b"))
        assert not is_strongly_typical(seq, {"a": 1.0, "b": 0.0}, 0.5)

    def test_empty_sequence_rejected(self):
        with pytest.raises(ValueError):
            is_strongly_typical(SymbolSequence("X", ()), {"a": 1.0}, 0.1)

    def test_epsilon_positive(self):
        with pytest.raises(ValueError):
            is_strongly_typical(SymbolSequence("X", ("a",)), {"a": 1.0}, 0.0)


class TestBinaryEntropy:
    def test_fair_coin(self):
        assert binary_entropy(0.5) == pytest.approx(1.0, abs=1e-12)

    def test_boundaries(self):
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_one_third(self):
        assert binary_entropy(1 / 3) == pytest.approx(0.9182958340544896, abs=1e-12)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            binary_entropy(1.5)


class TestInvariants:
    def test_chain_rule(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            pmf = random_pmf(rng, 4, 5, density=0.7)
            lhs = entropy(pmf, ("X", "Y"))
            rhs = entropy(pmf, "X") + conditional_entropy(pmf, "Y", "X")
            assert abs(lhs - rhs) <= 1e-9

    def test_nonnegativity(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            pmf = random_pmf(rng, 3, 6)
            assert mutual_information(pmf, "X", "Y") >= 0.0
            assert conditional_entropy(pmf, "X", "Y") >= 0.0

    def test_marginal_consistency(self):
        rng = np.random.default_rng(5)
        for _ in range(25):
            pmf = random_pmf(rng, 5, 4)
            marg = pmf.marginal("X")
            assert entropy(pmf, "X") == pytest.approx(entropy(marg, "X"), abs=1e-12)
            assert entropy(marg, "X") == pytest.approx(
                oracle_entropy(pmf.marginal_distribution("X").values()), abs=1e-12
            )

    def test_sampling_byte_identical(self, two_blocks):
        a = sample_iid(two_blocks, 1000, seed=99)
        b = sample_iid(two_blocks, 1000, seed=99)
        assert repr(a) == repr(b)


class TestJson:
    def test_roundtrip(self, two_blocks):
        assert pmf_from_dict(pmf_to_dict(two_blocks)) == two_blocks

    def test_fraction_strings(self):
        pmf = pmf_from_dict(
            {
                "variables": ["X"],
                "alphabets": {"X": ["a", "b", "c"]},
                "mass": [
                    {"tuple": ["a"], "p": "1/3"},
                    {"tuple": ["b"], "p": "1/3"},
                    {"tuple": ["c"], "p": "1/3"},
                ],
            }
        )
        assert sum(pmf.mass.values()) == pytest.approx(1.0, abs=1e-12)

    def test_file_roundtrip(self, two_blocks, tmp_path):
        path = tmp_path / "pmf.json"
        dump_pmf(two_blocks, path)
        assert load_pmf(path) == two_blocks

    def test_missing_field(self):
        with pytest.raises(ValueError, match="missing field"):
            pmf_from_dict({"variables": ["X"]})

    def test_exact_worked_file_layout(self, fixtures_dir):
        obj = json.loads((fixtures_dir / "pmf_two_blocks.json").read_text())
        assert obj["variables"] == ["X", "Y"]
        assert obj["mass"][0] == {"tuple": ["1", "1"], "p": "1/3"}
