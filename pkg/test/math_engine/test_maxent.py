"""Tests for entailment segments, maximum entropy and eccentricity."""

import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from app.exceptions import (
    DegenerateSegmentError,
    InconsistentInputsError,
    InfeasibleError,
    InvalidInputError,
    PointNotInSetError,
    UnsupportedDimensionError,
)
from app.math_engine.kernel import LinearSystem, eq
from app.math_engine.maxent import (
    MODE_MAXENT,
    MODE_UNIFORM,
    SegmentSet,
    centroid,
    conjunction_segment,
    conjunction_system,
    ecc_sweep,
    eccentricity,
    eccentricity_report,
    eccentricity_squared,
    entropy,
    expected_ecc_mc,
    maxent_conjunction,
    maxent_on_segment,
    modus_ponens_segment,
    modus_ponens_system,
    segment_from_system,
)

F = Fraction


class TestSegments:
    def test_conjunction_vertices(self):
        seg = conjunction_segment("0.9", "0.1")
        assert seg.v1 == (0, F(9, 10), F(1, 10), 0)
        assert seg.v2 == (F(1, 10), F(4, 5), 0, F(1, 10))
        assert centroid(seg) == (F(1, 20), F(17, 20), F(1, 20), F(1, 20))

    def test_modus_ponens_vertices(self):
        seg = modus_ponens_segment("0.8", "0.7")
        assert seg.v1 == (F(1, 2), F(3, 10), F(1, 5), 0)
        assert seg.v2 == (F(1, 2), F(3, 10), 0, F(1, 5))

    def test_modus_ponens_needs_consistent_inputs(self):
        with pytest.raises(InconsistentInputsError):
            modus_ponens_segment("0.3", "0.5")

    def test_probability_range(self):
        with pytest.raises(InvalidInputError):
            conjunction_segment("1.2", "0.5")

    def test_vertices_must_be_distributions(self):
        with pytest.raises(InvalidInputError):
            SegmentSet((F(1, 2), F(1, 4)), (F(1, 2), F(1, 2)))

    def test_degenerate(self):
        seg = conjunction_segment(1, "0.5")
        assert seg.is_degenerate
        with pytest.raises(DegenerateSegmentError):
            maxent_on_segment(seg)
        with pytest.raises(DegenerateSegmentError):
            eccentricity_squared(seg.v1, seg)


class TestSegmentFromSystem:
    def test_recovers_conjunction_segment(self):
        seg = segment_from_system(conjunction_system("0.9", "0.1"))
        expected = conjunction_segment("0.9", "0.1")
        assert {seg.v1, seg.v2} == {expected.v1, expected.v2}

    def test_recovers_modus_ponens_segment(self):
        seg = segment_from_system(modus_ponens_system("0.8", "0.7"))
        expected = modus_ponens_segment("0.8", "0.7")
        assert {seg.v1, seg.v2} == {expected.v1, expected.v2}

    def test_single_point(self):
        seg = segment_from_system(conjunction_system(1, "0.5"))
        assert seg.is_degenerate

    def test_rejects_higher_dimension(self):
        with pytest.raises(UnsupportedDimensionError):
            segment_from_system(LinearSystem(4, (eq((1, 1, 0, 0), "0.5"),)))

    def test_empty(self):
        system = conjunction_system("0.9", "0.9").with_constraints(eq((1, 0, 0, 0), 0))
        with pytest.raises(InfeasibleError):
            segment_from_system(system)


class TestEccentricity:
    def test_maxent_conjunction_example(self):
        seg = conjunction_segment("0.9", "0.1")
        m = maxent_conjunction("0.9", "0.1")
        assert m == (F(9, 100), F(81, 100), F(1, 100), F(9, 100))
        assert eccentricity_squared(m, seg) == F(16, 25)
        assert eccentricity(m, seg) == pytest.approx(0.8)

    def test_centroid_and_vertices(self):
        seg = conjunction_segment("0.3", "0.6")
        assert eccentricity_squared(centroid(seg), seg) == 0
        assert eccentricity_squared(seg.v1, seg) == 1
        assert eccentricity_squared(seg.v2, seg) == 1

    def test_point_off_segment(self):
        seg = conjunction_segment("0.3", "0.6")
        with pytest.raises(PointNotInSetError):
            eccentricity_squared(("0.25", "0.25", "0.25", "0.25"), seg)
        with pytest.raises(PointNotInSetError):
            eccentricity_squared(("0.5", "0.5"), seg)

    def test_report(self):
        seg = conjunction_segment("0.9", "0.1")
        report = eccentricity_report(maxent_conjunction("0.9", "0.1"), seg)
        assert report.centroid == centroid(seg)
        assert report.ecc == pytest.approx(0.8)

    def test_sweep(self):
        rows = ecc_sweep(3)
        assert len(rows) == 9
        assert rows[4][:2] == (F(1, 2), F(1, 2))
        assert rows[4][2] == 0
        assert all(0 <= r[2] <= 1 for r in rows)
        with pytest.raises(InvalidInputError):
            ecc_sweep(0)


class TestMaxent:
    def test_entropy(self):
        assert entropy([F(1, 2), F(1, 2)]) == pytest.approx(math.log(2))
        assert entropy([1, 0, 0]) == 0

    def test_conjunction_grid(self):
        for i in range(1, 20):
            for j in range(1, 20):
                a, b = F(i, 20), F(j, 20)
                numeric = maxent_on_segment(conjunction_segment(a, b))
                exact = maxent_conjunction(a, b)
                assert max(abs(x - float(y)) for x, y in zip(numeric, exact)) <= 1e-9

    def test_modus_ponens_grid_is_centroid(self):
        for i in range(1, 20):
            for j in range(1, 21):
                x, y = F(i, 20), F(j, 20)
                if y < 1 - x:
                    continue
                seg = modus_ponens_segment(x, y)
                if seg.is_degenerate:
                    continue
                numeric = maxent_on_segment(seg)
                assert max(abs(p - float(c)) for p, c in zip(numeric, centroid(seg))) <= 1e-9

    def test_endpoint_maximizer(self):
        # Entropy increases all the way to v2 on this segment
        seg = SegmentSet((1, 0, 0), (F(1, 3), F(1, 3), F(1, 3)))
        assert maxent_on_segment(seg) == pytest.approx((1 / 3, 1 / 3, 1 / 3), abs=1e-12)


class TestMonteCarlo:
    def test_independent_of_worker_count(self):
        serial = expected_ecc_mc(MODE_MAXENT, 20_000, seed=3, chunk_size=5_000, workers=1)
        threaded = expected_ecc_mc(MODE_MAXENT, 20_000, seed=3, chunk_size=5_000, workers=4)
        assert serial.mean == threaded.mean
        assert serial.samples == 20_000

    def test_seed_reproducible(self):
        first = expected_ecc_mc(MODE_UNIFORM, 10_000, seed=5)
        second = expected_ecc_mc(MODE_UNIFORM, 10_000, seed=5)
        assert first.mean == second.mean

    def test_moderate_sample_means(self):
        assert abs(expected_ecc_mc(MODE_MAXENT, 200_000, seed=7).mean - 1 / 3) <= 0.01
        assert abs(expected_ecc_mc(MODE_UNIFORM, 200_000, seed=7).mean - 0.5) <= 0.005

    def test_bad_arguments(self):
        with pytest.raises(InvalidInputError):
            expected_ecc_mc("median_point", 10)
        with pytest.raises(InvalidInputError):
            expected_ecc_mc(MODE_MAXENT, 0)

    @pytest.mark.slow
    def test_million_samples(self):
        maxent = expected_ecc_mc(MODE_MAXENT, 1_000_000, seed=7)
        uniform = expected_ecc_mc(MODE_UNIFORM, 1_000_000, seed=7)
        assert 0.323 <= maxent.mean <= 0.343
        assert abs(uniform.mean - 0.5) <= 0.005


interior = st.integers(1, 99).map(lambda k: F(k, 100))


@pytest.mark.properties
class TestMaxentProperties:
    @given(interior, interior)
    @settings(max_examples=200, deadline=None)
    def test_independence_point_lies_on_segment(self, a, b):
        m = maxent_conjunction(a, b)
        assert max(F(0), a + b - 1) <= m[0] <= min(a, b)
        seg = conjunction_segment(a, b)
        assume(not seg.is_degenerate)
        assert 0 <= eccentricity_squared(m, seg) <= 1

    @given(interior, interior)
    @settings(max_examples=200, deadline=None)
    def test_entropy_ordering(self, a, b):
        seg = conjunction_segment(a, b)
        assume(not seg.is_degenerate)
        best = entropy(maxent_on_segment(seg))
        middle = entropy(centroid(seg))
        assert best >= middle - 1e-12
        assert middle >= min(entropy(seg.v1), entropy(seg.v2)) - 1e-12

    @given(interior, interior, st.integers(0, 64).map(lambda k: F(k, 64)))
    @settings(max_examples=200, deadline=None)
    def test_ecc_is_distance_from_middle_parameter(self, a, b, t):
        seg = conjunction_segment(a, b)
        assume(not seg.is_degenerate)
        assert eccentricity_squared(seg.at(t), seg) == (2 * t - 1) ** 2
        assert eccentricity_squared(seg.at(t), seg.swapped()) == (2 * t - 1) ** 2
