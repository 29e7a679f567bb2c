"""
Test the random generators: structures, cyclically reduced graphs and subgroups
"""

import math
from collections import Counter

import numpy as np
import pytest
from scipy.stats import chisquare

from counting.asymptotics import expected_type
from counting.tables import CountingEngine
from oracle.brute import brute_counts
from psl2.exceptions import InvalidSizeError, UnknownFamilyError
from sampling.rng import RngState
from sampling.structures import StructureKind, sample_structure
from sampling.subgroups import (
    SampleStats, Sampler, sample_cyclically_reduced, sample_finite_index, sample_free,
    sample_free_finite_index, sample_subgroup,
)
from stallings.graphs import canonical_form, combinatorial_type, is_cyclically_reduced, validate
from stallings.properties import index, is_free

ALPHA = 0.001


@pytest.fixture(scope="module")
def engine():
    return CountingEngine()


class TestRng:
    """Seeded random source"""

    def test_uniform_bigint_range(self):
        """Test bounds of the big integer draw"""
        rng = RngState(3)
        bound = 10 ** 40 + 3
        for _ in range(200):
            assert 1 <= rng.uniform_bigint(bound) <= bound
        assert all(rng.uniform_bigint(1) == 1 for _ in range(10))
        with pytest.raises(ValueError):
            rng.uniform_bigint(0)

    def test_determinism(self):
        """Test that equal seeds give equal streams"""
        a, b = RngState(42), RngState(42)
        assert [a.uniform_bigint(10 ** 30) for _ in range(20)] == [b.uniform_bigint(10 ** 30) for _ in range(20)]
        assert RngState(42).permutation(50) == RngState(42).permutation(50)
        assert sorted(RngState(5).permutation(30)) == list(range(30))

    def test_derive(self):
        """Test that derived streams differ from each other"""
        rng = RngState(11)
        assert rng.derive(0).seed == 11
        assert rng.derive(1).uniform_bigint(2 ** 64) != rng.derive(2).uniform_bigint(2 ** 64)


class TestStructures:
    """Uniform tau2 / tau3 structures"""

    def test_shapes(self, engine):
        """Test that every kind respects its orbit restrictions"""
        rng = RngState(1)
        for kind in StructureKind:
            n = 12
            s = sample_structure(kind, n, rng, engine)
            sizes = [len(orbit) for orbit in s.orbits]
            covered = sorted(v for orbit in s.orbits for v in orbit)
            if kind.letter == "a":
                assert covered == list(range(n))
                assert all(s.mapping[s.mapping[v]] == v for v in range(n))
            if kind in (StructureKind.TAU2_LOOPFREE, StructureKind.TAU3_LOOPFREE,
                        StructureKind.TAU3_PERM_LOOPFREE):
                assert s.loops == []
            if kind in (StructureKind.TAU3_PERMUTATIONAL, StructureKind.TAU3_PERM_LOOPFREE):
                assert all(w is not None for w in s.mapping)
                assert 2 not in sizes
            assert max(sizes) <= 3

    def test_empty_kind(self, engine):
        """Test that a kind with no structure of the size raises"""
        with pytest.raises(InvalidSizeError):
            sample_structure(StructureKind.TAU2_LOOPFREE, 5, RngState(0), engine)
        with pytest.raises(InvalidSizeError):
            sample_structure(StructureKind.TAU3_PERM_LOOPFREE, 4, RngState(0), engine)

    @pytest.mark.statistical
    def test_tau3_uniform(self, engine):
        """Test uniformity over the 33 tau3 structures on 4 labels"""
        rng = RngState(2024)
        counts = Counter(sample_structure(StructureKind.TAU3, 4, rng, engine).mapping for _ in range(33 * 120))
        assert len(counts) == 33
        assert chisquare(list(counts.values())).pvalue > ALPHA


class TestCyclicallyReduced:
    """Connected pairs of structures"""

    def test_valid(self, engine):
        """Test that accepted graphs are proper and cyclically reduced"""
        rng = RngState(9)
        for family, n in (("all", 10), ("fi", 9), ("free", 10), ("frfi", 12)):
            g = sample_cyclically_reduced(n, family, rng, engine)
            assert g.n == n and g.root is None
            assert is_cyclically_reduced(g)
            assert validate(g, "cyclically_reduced") == []
            t = combinatorial_type(g)
            if family in ("fi", "frfi"):
                assert t.k3 == 0
            if family in ("free", "frfi"):
                assert t.l2 == t.l3 == 0

    def test_unsupported_sizes(self, engine):
        """Test odd sizes for loop-free graphs"""
        with pytest.raises(InvalidSizeError):
            sample_cyclically_reduced(7, "free", RngState(0), engine)
        with pytest.raises(UnknownFamilyError):
            sample_cyclically_reduced(4, "torsion", RngState(0), engine)

    def test_acceptance_rate(self, engine):
        """Test that connectivity rejections track p_2 = 5/6"""
        stats = SampleStats()
        rng = RngState(77)
        for _ in range(3000):
            sample_cyclically_reduced(2, "all", rng, engine, stats)
        assert stats.attempts - stats.rejections == 3000
        assert stats.acceptance_rate == pytest.approx(5 / 6, abs=0.03)


class TestSubgroupSamplers:
    """Rooted subgroup samplers"""

    def test_subgroup_validity(self, engine):
        """Test rooted validity and size for every family"""
        rng = RngState(5)
        for _ in range(10):
            g = sample_subgroup(9, rng, engine)
            assert g.n == 9 and g.root == 0
            assert validate(g, "rooted") == []

            g = sample_finite_index(9, rng, engine)
            assert index(g) == 9

            g = sample_free(10, rng, engine)
            assert g.n == 10 and is_free(g)[0]
            assert validate(g, "rooted") == []

            g = sample_free(9, rng, engine)
            assert g.n == 9 and is_free(g)[0]
            assert not is_cyclically_reduced(g)

            g = sample_free_finite_index(12, rng, engine)
            assert index(g) == 12 and is_free(g) == (True, 3)

    def test_size_one(self, engine):
        """Test that the four size-1 subgroups all occur"""
        rng = RngState(8)
        seen = {canonical_form(sample_subgroup(1, rng, engine)) for _ in range(200)}
        assert len(seen) == 4

    def test_size_errors(self, engine):
        """Test sizes without subgroups"""
        with pytest.raises(InvalidSizeError):
            sample_subgroup(0, RngState(0), engine)
        with pytest.raises(InvalidSizeError):
            sample_free(1, RngState(0), engine)
        with pytest.raises(InvalidSizeError):
            sample_free_finite_index(8, RngState(0), engine)

    @pytest.mark.parametrize("family,n", [("all", 3), ("fi", 4), ("free", 4), ("free", 5), ("frfi", 6)])
    def test_support_matches_enumeration(self, engine, family, n):
        """Test that samples only hit subgroups found by exhaustive enumeration"""
        classes = brute_counts(n, family, dedupe=True).classes
        sampler = Sampler(engine, seed=1234)
        forms = {canonical_form(g) for g in sampler.sample_many(family, n, 40 * len(classes))}
        assert forms == classes


def _in_family(family, g, n):
    if family == "all":
        return True
    if family == "fi":
        return index(g) == n
    if family == "free":
        return is_free(g)[0]
    return index(g) == n and is_free(g)[0]


@pytest.mark.statistical
@pytest.mark.parametrize("family,n,expected,per_class", [
    ("all", 3, 16, 150), ("fi", 4, 8, 150), ("free", 4, 5, 150), ("free", 5, 4, 150), ("frfi", 6, 5, 150),
    ("all", 4, 34, 1000), ("fi", 6, 22, 1000), ("free", 6, 17, 1000),
])
def test_uniformity(engine, family, n, expected, per_class):
    """Test exact uniformity over the subgroups of one size with a chi-square test"""
    sampler = Sampler(engine, seed=20240917 + n)
    draws = per_class * expected
    graphs = sampler.sample_many(family, n, draws)
    for g in graphs:
        assert g.n == n
        assert validate(g, "rooted") == []
        assert _in_family(family, g, n)
    counts = Counter(canonical_form(g) for g in graphs)
    assert len(counts) == expected
    assert sum(counts.values()) == draws
    assert chisquare(list(counts.values())).pvalue > ALPHA


class TestSampler:
    """Batch sampling"""

    def test_seeded_batches_repeat(self, engine):
        """Test that a seed fixes the whole batch"""
        first = Sampler(engine, seed=99).sample_many("all", 8, 15)
        second = Sampler(engine, seed=99).sample_many("all", 8, 15)
        assert first == second

    def test_parallel_batches_repeat(self, engine):
        """Test that parallel batches depend only on the seed and job count"""
        first = Sampler(engine, seed=3).sample_many("fi", 7, 20, jobs=3)
        second = Sampler(engine, seed=3).sample_many("fi", 7, 20, jobs=3)
        assert len(first) == 20
        assert first == second

    def test_seed_property(self, engine):
        """Test that the seed is exposed for reporting"""
        assert Sampler(engine, seed=12345).seed == 12345
        assert 0 <= Sampler(engine).seed < 2 ** 64

    def test_unknown_family(self, engine):
        """Test that families without a sampler are refused"""
        with pytest.raises(UnknownFamilyError):
            Sampler(engine, seed=1).sample("crfree", 4)
        with pytest.raises(UnknownFamilyError):
            Sampler(engine, seed=1).sample_many("torsion", 4, 1)

    def test_stats_accumulate(self, engine):
        """Test that worker statistics are merged"""
        sampler = Sampler(engine, seed=4)
        sampler.sample_many("all", 6, 30, jobs=2)
        assert sampler.stats.attempts >= 30
        assert 0 < sampler.stats.acceptance_rate <= 1


@pytest.mark.slow
def test_fixed_point_deviations():
    """Test that fixed points of large involutions stay within the deviation bounds"""
    n = 10_000
    engine = CountingEngine(univariate_cap=n)
    rng = RngState(31337)
    mean = math.sqrt(n)
    for _ in range(40):
        loops = len(sample_structure(StructureKind.TAU2, n, rng, engine).loops)
        assert 0.5 * mean < loops < 2 * mean


@pytest.mark.slow
@pytest.mark.parametrize("family,n", [("all", 10_000), ("fi", 10_000), ("free", 1000)])
def test_type_concentration(family, n):
    """Test that sampled subgroups at large size concentrate around the predicted type"""
    engine = CountingEngine(univariate_cap=max(n, 1000))
    graphs = Sampler(engine, seed=8128).sample_many(family, n, 2000)
    types = np.array([tuple(combinatorial_type(g)) for g in graphs], dtype=float)
    l2, l3, k3 = types[:, 3], types[:, 4], types[:, 2]
    predicted = expected_type(family, n)

    if family == "free":
        assert not l2.any() and not l3.any()
        assert k3.mean() == pytest.approx(predicted.k3, rel=0.2)
        return

    root = math.sqrt(n)
    assert np.mean(l2 <= 0.5 * root) < 0.01
    assert np.mean(l2 >= 1.5 * root) < 0.01
    assert l2.mean() == pytest.approx(predicted.l2, rel=0.05)
    assert l3.mean() == pytest.approx(predicted.l3, rel=0.1)
    if family == "all":
        assert k3.mean() == pytest.approx(predicted.k3, rel=0.12)
    else:
        assert not k3.any()
