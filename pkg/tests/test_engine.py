from __future__ import annotations

import itertools
import math

import numpy as np
import pytest

from grayspace.engine import (
    DEFAULT_BUCKETS,
    OTHER_BUCKET_LABEL,
    Bucket,
    cdf_from_map,
    parse_buckets,
    run_monte_carlo,
    single_realization_map,
    utilization_from_map,
    write_cdf_csv,
    write_utilization_csv,
)
from grayspace.errors import ConfigError, DataError, DomainError
from grayspace.griddata import HouseholdGrid, ingest_grid
from grayspace.linkbudget import OFCOM, DeviceProfile
from grayspace.propagation import HataParams
from grayspace.scenario import ChannelPlan, KnowledgeConfig

FIXED = DeviceProfile("fixed-4w", eirp_mw=4000.0, antenna_height_m=30.0)
PORTABLE = DeviceProfile("portable-100mw", eirp_mw=100.0, antenna_height_m=2.0)
HATA_FIXED = HataParams(650.0, 30.0, 10.0, "suburban")
HATA_PORTABLE = HataParams(650.0, 2.0, 10.0, "suburban")
PLAN = ChannelPlan()
KL1 = KnowledgeConfig("KL1")
KL2 = KnowledgeConfig("KL2")


def run(grid, knowledge, device=FIXED, hata=HATA_FIXED, **kw):
    return run_monte_carlo(grid, device, OFCOM, hata, PLAN, knowledge, **kw)


class TestBuckets:
    def test_parse_default_text(self):
        assert parse_buckets("24-64,72-96,96<") == DEFAULT_BUCKETS

    def test_contains_edges(self):
        closed = Bucket("24-64", 24.0, 64.0)
        assert closed.contains(24.0) and closed.contains(64.0)
        assert not closed.contains(23.999) and not closed.contains(64.001)
        open_low = Bucket("96<", 96.0, math.inf, lower_inclusive=False)
        assert not open_low.contains(96.0)
        assert open_low.contains(96.0001) and open_low.contains(math.inf)

    @pytest.mark.parametrize("text", ["abc", "", "64-24", "24--64"])
    def test_malformed(self, text):
        with pytest.raises(ConfigError):
            parse_buckets(text)

    @pytest.mark.parametrize("text", ["24-64,60-70", "64<,72-96", "0<,5<"])
    def test_overlap_rejected(self, text):
        with pytest.raises(ConfigError):
            parse_buckets(text)

    def test_closed_upper_edge_does_not_overlap_open_bucket(self):
        parse_buckets("24-96,96<")

    def test_nan_bounds_rejected(self):
        with pytest.raises(ConfigError):
            Bucket("bad", math.nan, 10.0)


class TestSingleRealization:
    def test_kl1_five_by_five(self):
        # one receiver in the middle; co-channel reach (8 km) spans the whole
        # grid, adjacent reach (1 km) only the surrounding 3x3 box
        grid = ingest_grid([(2, 2, 3)], resolution_m=1000.0, rows=5, cols=5)
        gsm = single_realization_map(grid, FIXED, OFCOM, HATA_FIXED, PLAN, KL1, 0)
        expected = np.full((5, 5), 80.0)  # ten 8 MHz adjacent slots
        expected[1:4, 1:4] = 0.0
        assert np.array_equal(gsm.values, expected)

    def test_kl1_portable_blocks_only_neighbourhood(self):
        grid = ingest_grid([(0, 0, 1)], resolution_m=1000.0, rows=4, cols=4)
        gsm = single_realization_map(
            grid, PORTABLE, OFCOM, HATA_PORTABLE, PLAN, KL1, 0
        )
        expected = np.full((4, 4), 120.0)
        expected[:2, :2] = 0.0  # footprint clipped at the corner
        assert np.array_equal(gsm.values, expected)

    def test_empty_grid_is_all_capacity(self):
        grid = ingest_grid([], resolution_m=1000.0, rows=3, cols=3)
        gsm = single_realization_map(grid, FIXED, OFCOM, HATA_FIXED, PLAN, KL1, 0)
        assert (gsm.values == 120.0).all()

    def test_invalid_cells_are_nan(self):
        counts = np.zeros((3, 3), dtype=np.int64)
        valid = np.ones((3, 3), dtype=bool)
        valid[0, 0] = False
        grid = HouseholdGrid(counts, valid, 1000.0, municipal_area_km2=8.0)
        gsm = single_realization_map(grid, FIXED, OFCOM, HATA_FIXED, PLAN, KL1, 0)
        assert np.isnan(gsm.values[0, 0])
        assert not np.isnan(gsm.values[1:]).any()


def box_blocked(cell, receiver, radius_m, res_m):
    """Protection rule, from its definition: the closest point of the
    receiver's cell box is nearer than the protection radius."""
    p = max(abs(cell[0] - receiver[0]) - 1, 0) * res_m
    q = max(abs(cell[1] - receiver[1]) - 1, 0) * res_m
    return p * p + q * q < radius_m * radius_m


def exact_map(shape, receivers, usages, co_m, adj_m, res_m):
    """Availability in MHz for one deterministic usage assignment.

    ``usages`` hold MUX numbers 1..5; guard channels are translated back
    to the MUX they protect."""
    mux_of = {ch: i for i, ch in enumerate(PLAN.used_channels, start=1)}
    guard_sets = [
        {mux_of[ch] for ch in guards} for _, guards in PLAN.adjacent_entries()
    ]
    values = np.zeros(shape)
    for cell in itertools.product(range(shape[0]), range(shape[1])):
        slots = 0
        for mux in range(1, 6):
            if not any(
                mux in use and box_blocked(cell, rx, co_m, res_m)
                for rx, use in zip(receivers, usages)
            ):
                slots += 1
        for guarded in guard_sets:
            if not any(
                box_blocked(cell, rx, adj_m, res_m)
                for rx, use in zip(receivers, usages)
                if guarded & use
            ):
                slots += 1
        values[cell] = slots * PLAN.channel_bandwidth_mhz
    return values


class TestMonteCarloConvergence:
    def test_kl2_mean_matches_exact_enumeration(self):
        # Three single-household receivers; each is independently in one of
        # three states, so the exact mean map is a 27-term enumeration.
        receivers = [(2, 2), (6, 9), (9, 3)]
        grid = ingest_grid(
            [(c, r, 1) for r, c in receivers], resolution_m=1000.0, rows=12, cols=12
        )
        states = [
            (0.02, frozenset()),
            (0.98 * 0.85, frozenset({1})),
            (0.98 * 0.15, frozenset({1, 2, 3, 4, 5})),
        ]
        mean = np.zeros((12, 12))
        second = np.zeros((12, 12))
        for combo in itertools.product(states, repeat=3):
            p = math.prod(w for w, _ in combo)
            values = exact_map(
                (12, 12), receivers, [u for _, u in combo], 8000.0, 1000.0, 1000.0
            )
            mean += p * values
            second += p * values**2
        var = np.maximum(second - mean**2, 0.0)

        realizations = 10_000
        result = run(grid, KL2, realizations=realizations, master_seed=123)
        tol = 3.0 * np.sqrt(var / realizations) + 1e-9
        assert (np.abs(result.mean_map.values - mean) <= tol).all()

    def test_cdf_and_utilization_consistency(self):
        grid = ingest_grid([(3, 3, 7), (8, 2, 5)], resolution_m=1000.0, rows=10, cols=10)
        result = run(grid, KL2, realizations=200, master_seed=5)
        cdf = result.cdf
        assert cdf.percent_area[0] == 100.0
        assert (np.diff(cdf.percent_area) <= 0).all()
        assert cdf.levels_mhz[-1] == 120.0
        assert result.utilization.labels[-1] == OTHER_BUCKET_LABEL
        assert result.utilization.mean_households.sum() == pytest.approx(12.0)


class TestKL1Shortcut:
    def test_realization_count_is_irrelevant(self):
        grid = ingest_grid([(1, 1, 2), (4, 3, 6)], resolution_m=1000.0, rows=6, cols=6)
        a = run(grid, KL1, realizations=1)
        b = run(grid, KL1, realizations=250)
        assert a.mean_map.values.tobytes() == b.mean_map.values.tobytes()
        assert a.cdf.percent_area.tobytes() == b.cdf.percent_area.tobytes()
        assert (
            a.utilization.mean_households.tobytes()
            == b.utilization.mean_households.tobytes()
        )
        assert b.realizations == 250  # reported as requested

    def test_mean_equals_single_realization(self):
        grid = ingest_grid([(1, 1, 2), (4, 3, 6)], resolution_m=1000.0, rows=6, cols=6)
        result = run(grid, KL1, realizations=50)
        gsm = single_realization_map(grid, FIXED, OFCOM, HATA_FIXED, PLAN, KL1, 0)
        assert np.array_equal(result.mean_map.values, gsm.values)


class TestWorkers:
    def test_bit_identical_across_worker_counts(self):
        grid = ingest_grid(
            [(2, 2, 4), (7, 5, 3), (11, 9, 9)], resolution_m=1000.0, rows=12, cols=14
        )
        base = run(grid, KL2, realizations=24, master_seed=9, workers=1)
        for workers in (2, 5):
            other = run(grid, KL2, realizations=24, master_seed=9, workers=workers)
            assert base.mean_map.values.tobytes() == other.mean_map.values.tobytes()
            assert base.cdf.percent_area.tobytes() == other.cdf.percent_area.tobytes()
            assert (
                base.utilization.mean_households.tobytes()
                == other.utilization.mean_households.tobytes()
            )


class TestValidation:
    def grid(self):
        return ingest_grid([(1, 1, 2)], resolution_m=1000.0, rows=4, cols=4)

    def test_plan_must_have_five_channels(self):
        plan = ChannelPlan(used_channels=(21, 24, 27, 30))
        with pytest.raises(ConfigError, match="5 MUX"):
            run_monte_carlo(self.grid(), FIXED, OFCOM, HATA_FIXED, plan, KL1)

    def test_grid_needs_valid_cells(self):
        counts = np.zeros((2, 2), dtype=np.int64)
        grid = HouseholdGrid(counts, np.zeros((2, 2), bool), 1000.0, 1.0)
        with pytest.raises(DataError, match="no valid cells"):
            run(grid, KL1)

    def test_realizations_and_workers_bounds(self):
        with pytest.raises(DomainError):
            run(self.grid(), KL2, realizations=0)
        with pytest.raises(DomainError):
            run(self.grid(), KL2, workers=0)

    def test_mean_map_is_read_only(self):
        result = run(self.grid(), KL1)
        with pytest.raises(ValueError):
            result.mean_map.values[0, 0] = 1.0


class TestMapStatistics:
    def test_cdf_from_map_matches_engine_for_kl1(self):
        grid = ingest_grid([(2, 2, 3)], resolution_m=1000.0, rows=6, cols=6)
        result = run(grid, KL1)
        again = cdf_from_map(result.mean_map.values, result.cdf.levels_mhz)
        assert again.percent_area.tobytes() == result.cdf.percent_area.tobytes()

    def test_utilization_from_map_matches_engine_for_kl1(self):
        grid = ingest_grid([(2, 2, 3), (5, 1, 2)], resolution_m=1000.0, rows=6, cols=6)
        result = run(grid, KL1)
        again = utilization_from_map(
            result.mean_map.values, grid.counts, DEFAULT_BUCKETS
        )
        assert (
            again.mean_households.tobytes()
            == result.utilization.mean_households.tobytes()
        )

    def test_other_bucket_collects_gaps(self):
        values = np.array([[0.0, 30.0, 70.0, 100.0, np.nan]])
        counts = np.array([[1, 2, 4, 8, 0]])
        table = utilization_from_map(values, counts, DEFAULT_BUCKETS)
        assert table.labels == ("24-64", "72-96", "96<", OTHER_BUCKET_LABEL)
        # 70 falls between buckets, 0 below all of them -> "other"
        assert table.mean_households.tolist() == [2.0, 0.0, 8.0, 5.0]

    def test_cdf_from_map_rejects_all_nan(self):
        with pytest.raises(DataError):
            cdf_from_map(np.full((2, 2), np.nan), [0.0, 8.0])

    def test_shape_mismatch(self):
        with pytest.raises(DataError):
            utilization_from_map(np.zeros((2, 2)), np.zeros((3, 2)), DEFAULT_BUCKETS)


class TestWriters:
    def test_cdf_csv(self, tmp_path):
        cdf = cdf_from_map(np.array([[0.0, 48.0, 96.0]]), [0.0, 48.0, 120.0])
        path = tmp_path / "cdf.csv"
        write_cdf_csv(path, cdf)
        assert path.read_text() == (
            "gray_mhz,percent_area\n0,100\n48,66.66666667\n120,0\n"
        )

    def test_utilization_csv(self, tmp_path):
        table = utilization_from_map(
            np.array([[30.0, 100.0]]), np.array([[3, 4]]), DEFAULT_BUCKETS
        )
        path = tmp_path / "util.csv"
        write_utilization_csv(path, table)
        assert path.read_text() == (
            "bucket,mean_households\n24-64,3.0\n72-96,0.0\n96<,4.0\nother,0.0\n"
        )
