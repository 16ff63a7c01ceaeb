import csv
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import figure_params
from hardwall.errors import InvalidParams
from hardwall.kernel import expected_count_in_disk
from hardwall.model import ModelParams, equilibrium
from hardwall.sampler import (SampleConfig, invert_radial_cdf, radial_cdf, sample_arrays,
                              sample_configuration, sample_moduli, write_csv)


def test_config_validation():
    with pytest.raises(InvalidParams):
        SampleConfig(1, 0)
    with pytest.raises(InvalidParams):
        SampleConfig(1, 5, inversion_tol=0.0)
    with pytest.raises(InvalidParams):
        sample_configuration(figure_params(8), SampleConfig(1, 9))


def test_radial_cdf_bounds():
    with pytest.raises(InvalidParams):
        radial_cdf(figure_params(8), 0, 0.3)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 400), st.floats(1e-12, 1 - 1e-12))
def test_inversion_roundtrip(j, u):
    p = figure_params(400)
    r = invert_radial_cdf(p, j, u)
    assert not (p.r1 < r[0] < p.r2)
    assert radial_cdf(p, j, r)[0] == pytest.approx(u, abs=1e-11)


@pytest.mark.parametrize("seed", [0, 1, 2**63 - 1])
def test_no_points_in_gap_and_reproducible(seed):
    p = figure_params(512)
    pts = sample_configuration(p, SampleConfig(seed, p.n))
    assert len(pts) == p.n
    assert not any(p.r1 < q.r < p.r2 for q in pts)
    assert all(-math.pi < q.theta <= math.pi for q in pts)
    again = sample_configuration(p, SampleConfig(seed, p.n))
    assert pts == again


def test_different_seeds_differ():
    p = figure_params(64)
    assert not np.array_equal(sample_arrays(p, SampleConfig(1, 64))[1], sample_arrays(p, SampleConfig(2, 64))[1])


@pytest.mark.parametrize("j", [1, 40, 150])
def test_single_mode_ks(j):
    p = figure_params(256)
    rng = np.random.default_rng(j)
    u = rng.random(4000) + 2.0**-54
    r = np.sort(invert_radial_cdf(p, j, u))
    cdf = radial_cdf(p, np.full(r.shape, j), r)
    k = np.arange(1, r.size + 1)
    d = max(np.max(k / r.size - cdf), np.max(cdf - (k - 1) / r.size))
    assert d < 1.63 / math.sqrt(r.size)


def test_count_in_inner_disk_matches_expectation():
    p = figure_params(256)
    moduli = sample_moduli(p, range(200))
    counts = (moduli <= p.r1).sum(axis=1)
    probs = radial_cdf(p, np.arange(1, p.n + 1), np.full(p.n, p.r1))
    se = math.sqrt(float(np.sum(probs * (1 - probs))) / len(counts))
    assert abs(counts.mean() - expected_count_in_disk(p, p.r1)) <= 4 * se


def test_hard_edge_pile_up():
    p = figure_params(4096)
    eq = equilibrium(p)
    width = 5.0 / (eq.sigma1 * p.n)
    moduli = sample_moduli(p, range(3)).ravel()
    at_wall = np.mean((moduli >= p.r1 - width) & (moduli <= p.r1))
    mid = 0.5 * p.r1
    in_bulk = np.mean(np.abs(moduli - mid) <= width / 2)
    assert at_wall > 3 * max(in_bulk, 1.0 / moduli.size)


def test_csv_format(tmp_path):
    p = ModelParams.from_fractions(1.0, 0.0, 0.3, 0.6, 5)
    j, r, theta = sample_arrays(p, SampleConfig(3, 5))
    out = tmp_path / "pts.csv"
    write_csv(out, j, r, theta)
    text = out.read_bytes().decode()
    assert "\r" not in text
    rows = list(csv.reader(text.splitlines()))
    assert rows[0] == ["j", "r", "theta", "x", "y"]
    assert len(rows) == 6
    for row, rr in zip(rows[1:], r):
        assert float(row[1]) == rr
        assert float(row[3]) == pytest.approx(float(row[1]) * math.cos(float(row[2])), rel=1e-15, abs=1e-300)
