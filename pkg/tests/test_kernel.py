import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from conftest import figure_params
from hardwall.errors import InvalidParams
from hardwall.kernel import (DROP_LOG, LogComplex, expected_count_in_disk, kernel_eval,
                             kernel_matrix, kernel_term, kernel_value, log_hj, one_point, radial_cdf)
from hardwall.model import ModelParams, PlanePoint


@pytest.mark.parametrize("n, j", [(1, 1), (8, 3), (8, 8), (40, 9)])
def test_log_hj_against_quadrature(n, j):
    p = figure_params(n)
    ref = oracles.log_norm(p.b, p.alpha, p.r1, p.r2, n, j)
    assert log_hj(p, j) == pytest.approx(float(ref), rel=1e-13, abs=1e-13)


def test_log_hj_no_overflow_at_large_n():
    p = figure_params(4096)
    table = log_hj(p, np.arange(1, p.n + 1))
    assert np.all(np.isfinite(table))


def test_log_hj_domain():
    with pytest.raises(InvalidParams):
        log_hj(figure_params(8), 9)


def test_kernel_oracles(oracle):
    for case in oracle["kernels"]:
        p = figure_params(case["n"])
        got = kernel_value(p, tuple(case["z"]), tuple(case["w"]))
        ref = complex(float(case["re"]), float(case["im"]))
        assert abs(got - ref) <= 1e-12 * abs(ref)


@settings(max_examples=100, deadline=None)
@given(st.floats(-1e4, 1e4), st.floats(-1e3, 1e3))
def test_log_complex_normalization(phase, logmag):
    v = LogComplex(logmag, phase)
    assert -math.pi < v.phase <= math.pi
    assert math.cos(v.phase) == pytest.approx(math.cos(phase), abs=1e-9)
    assert LogComplex(-math.inf, phase).phase == 0.0


def test_gap_points_give_zero():
    p = figure_params(64)
    mid = PlanePoint(0.5 * (p.r1 + p.r2), 0.0)
    kv = kernel_eval(p, mid, PlanePoint(0.1, 0.0))
    assert kv.value == 0 and kv.terms_summed == 0
    assert kernel_term(p, 3, mid, mid).log_mag == -math.inf


def test_kernel_term_sum_matches():
    p = figure_params(30)
    z, w = PlanePoint(0.2, 0.3), PlanePoint(0.7, -0.4)
    total = sum(kernel_term(p, j, z, w).to_complex() for j in range(1, 31))
    assert total == pytest.approx(kernel_value(p, z, w), rel=1e-13)


def test_drop_rule_reports_truncation():
    p = figure_params(4096)
    kv = kernel_eval(p, PlanePoint(0.05, 0.0), PlanePoint(0.05, 0.0))
    assert kv.dropped_terms > 0
    assert kv.terms_summed + kv.dropped_terms == p.n
    assert math.isfinite(kv.max_term_log)
    assert DROP_LOG == 745.0


def test_origin():
    p = ModelParams.from_fractions(1.0, 0.0, 0.4, 0.6, 5)
    # only j = 1 survives at the origin when alpha = 0
    assert kernel_value(p, PlanePoint(0, 0), PlanePoint(0, 0)).real == pytest.approx(math.exp(-log_hj(p, 1)))


def _random_droplet_point(rng, p):
    while True:
        r = p.droplet_radius * math.sqrt(rng.uniform())
        if not p.r1 < r < p.r2:
            return PlanePoint(r, rng.uniform(-math.pi, math.pi))


@pytest.mark.parametrize("n", [16, 512])
def test_hermitian_and_psd(n):
    rng = np.random.default_rng(n)
    p = figure_params(n)
    for _ in range(5):
        pts = [_random_droplet_point(rng, p) for _ in range(4)]
        m = kernel_matrix(p, pts)
        assert np.allclose(m, m.conj().T, rtol=1e-12, atol=0)
        assert np.linalg.eigvalsh(m).min() >= -1e-8 * np.trace(m).real
    z, w = pts[0], pts[1]
    assert kernel_value(p, w, z) == pytest.approx(kernel_value(p, z, w).conjugate(), rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 0.37), st.floats(0.61, 1.0), st.floats(-3, 3), st.floats(-3, 3))
def test_cauchy_schwarz(rz, rw, tz, tw):
    p = figure_params(200)
    z, w = PlanePoint(rz, tz), PlanePoint(rw, tw)
    assert abs(kernel_value(p, z, w)) ** 2 <= one_point(p, z) * one_point(p, w) * (1 + 1e-10) + 1e-300


@pytest.mark.parametrize("n", [1, 7, 300, 4096])
def test_trace_equals_n(n):
    assert expected_count_in_disk(figure_params(n), 5.0) == pytest.approx(n, rel=1e-12)


def test_radial_cdf_shape():
    p = figure_params(50)
    j = 12
    assert radial_cdf(p, j, 0.0) == 0.0
    assert radial_cdf(p, j, 0.5 * (p.r1 + p.r2)) == pytest.approx(radial_cdf(p, j, p.r1), rel=1e-14)
    assert radial_cdf(p, j, 50.0) == pytest.approx(1.0, abs=1e-15)
    rs = np.linspace(0, 1.5, 400)
    assert np.all(np.diff(radial_cdf(p, np.full(rs.shape, j), rs)) >= -1e-15)


def test_radial_cdf_closed_form():
    # b = 1, alpha = 0, n = 1, j = 1: density proportional to 2 r exp(-r^2) off the gap
    p = ModelParams(1.0, 0.0, 0.5, 0.6, 1)
    mass = (1 - math.exp(-0.25)) + math.exp(-0.36)
    for r in (0.2, 0.5, 0.55, 0.6, 0.9, 3.0):
        ref = (1 - math.exp(-min(r, 0.5) ** 2) + (math.exp(-0.36) - math.exp(-r * r) if r >= 0.6 else 0)) / mass
        assert radial_cdf(p, 1, r) == pytest.approx(ref, rel=1e-14)
