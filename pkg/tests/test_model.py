import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import figure_params
from hardwall.errors import InvalidParams
from hardwall.model import (ModelParams, PlanePoint, equilibrium, hard_edge_point, in_gap,
                            mu_mass_in_disk, potential_Q, semi_hard_point)


@st.composite
def valid_params(draw, n=st.integers(1, 10**5)):
    b = draw(st.floats(0.2, 4.0))
    lo = draw(st.floats(0.02, 0.9))
    hi = draw(st.floats(lo + 0.02, 0.98))
    return ModelParams.from_fractions(b, draw(st.floats(-0.99, 5.0)), lo, hi, draw(n))


@pytest.mark.parametrize("kwargs", [
    dict(b=0.0, alpha=0.0, r1=0.1, r2=0.2, n=4),
    dict(b=1.0, alpha=-1.0, r1=0.1, r2=0.2, n=4),
    dict(b=1.0, alpha=0.0, r1=0.3, r2=0.2, n=4),
    dict(b=1.0, alpha=0.0, r1=0.3, r2=1.0, n=4),
    dict(b=1.0, alpha=0.0, r1=0.3, r2=0.5, n=0),
    dict(b=1.0, alpha=0.0, r1=0.3, r2=0.5, n=2.5),
])
def test_invalid_params_rejected(kwargs):
    with pytest.raises(InvalidParams):
        ModelParams(**kwargs)


def test_from_dict_both_forms():
    p = ModelParams.from_dict({"b": 1.3, "alpha": 1.26, "r1_frac": 0.42, "r2_frac": 0.67, "n": 10})
    q = ModelParams.from_dict(p.to_dict())
    assert p == q


def test_equilibrium_closed_form():
    p = ModelParams(0.5, 0.0, 1.0, math.sqrt(math.e), 10)
    eq = equilibrium(p)
    se = math.sqrt(math.e)
    assert eq.sigma_star == pytest.approx(se - 1, rel=1e-15)
    assert eq.sigma1 == pytest.approx(se - 1.5, rel=1e-14)
    assert eq.sigma2 == pytest.approx(1 - se / 2, rel=1e-14)


def test_figure_equilibrium(oracle):
    eq = equilibrium(figure_params())
    ref = oracle["figure_equilibrium"]
    assert (eq.sigma_star, eq.sigma1, eq.sigma2) == pytest.approx(ref, rel=1e-14)
    assert eq.sigma1 > 0 and eq.sigma2 > 0


@settings(max_examples=1000, deadline=None)
@given(valid_params())
def test_equilibrium_invariants(p):
    eq = equilibrium(p)
    b1, b2 = p.b * p.r1 ** (2 * p.b), p.b * p.r2 ** (2 * p.b)
    assert eq.sigma1 > 0 and eq.sigma2 > 0
    assert eq.sigma1 + eq.sigma2 == pytest.approx(b2 - b1, rel=1e-12, abs=1e-15)
    assert b1 < eq.sigma_star < b2
    assert 0 <= eq.x_frac < 1
    assert eq.x_frac == pytest.approx(eq.j_star - math.floor(eq.j_star), abs=1e-12)
    assert eq.delta_tilde_Q_r1 == pytest.approx(p.b**2 * p.r1 ** (2 * p.b - 2))


def test_x_frac_weakly_equidistributed():
    p = figure_params(1)
    xs = [equilibrium(p.with_n(n)).x_frac for n in range(1, 101)]
    assert abs(np.mean(xs) - 0.5) < 0.15


def test_potential_values():
    p = figure_params(10)
    assert potential_Q(p, PlanePoint(0.5 * (p.r1 + p.r2), 0.0)) == math.inf
    assert math.isfinite(potential_Q(p, PlanePoint(p.r1, 0.0)))
    assert math.isfinite(potential_Q(p, PlanePoint(p.r2, 1.0)))
    q = ModelParams(1.7, 0.0, 0.2, 0.5, 3)
    assert potential_Q(q, 1.0 * 0.6) == pytest.approx(0.6 ** 3.4)
    assert potential_Q(ModelParams(1.0, 0.0, 0.2, 0.5, 3), PlanePoint(0.0, 0.0)) == 0.0


def test_walls_belong_to_droplet():
    p = figure_params(10)
    assert not in_gap(p, p.r1) and not in_gap(p, p.r2)


def test_mass_in_disk():
    p = figure_params(10)
    eq = equilibrium(p)
    assert mu_mass_in_disk(p, p.droplet_radius) == 1.0
    assert mu_mass_in_disk(p, p.r1) == pytest.approx(eq.sigma_star)
    assert mu_mass_in_disk(p, 0.5 * (p.r1 + p.r2)) == pytest.approx(eq.sigma_star)
    assert mu_mass_in_disk(p, p.r2) == pytest.approx(eq.sigma_star + eq.sigma2)
    below = mu_mass_in_disk(p, p.r1 * (1 - 1e-12))
    assert mu_mass_in_disk(p, p.r1) - below == pytest.approx(eq.sigma1, rel=1e-9)
    rs = np.linspace(0, 1.2 * p.droplet_radius, 2001)
    masses = [mu_mass_in_disk(p, r) for r in rs]
    assert np.all(np.diff(masses) >= 0)


def test_hard_edge_point(oracle):
    p = figure_params(1024)
    eq = equilibrium(p)
    assert hard_edge_point(p, eq, 0.0).r == p.r1
    assert hard_edge_point(p, eq, eq.sigma1 * p.n).r == pytest.approx(0.0, abs=1e-15)
    assert hard_edge_point(p, eq, 0.21).r == pytest.approx(oracle["hard_edge_r_t021_n1024"], rel=1e-15)
    assert hard_edge_point(p, eq, 0.3, side="outer").r > p.r2
    with pytest.raises(InvalidParams):
        hard_edge_point(p, eq, 0.1, side="middle")


def test_semi_hard_point(oracle):
    p = figure_params(1024)
    assert semi_hard_point(p, 1.21).r == pytest.approx(oracle["semi_hard_r_s121_n1024"], rel=1e-15)
    q = figure_params(4096)
    lap = equilibrium(q).delta_tilde_Q_r1
    assert semi_hard_point(q, 1.45).r == pytest.approx(q.r1 - 1.45 / math.sqrt(2 * q.n * lap), rel=1e-14)
    assert semi_hard_point(q, 1e-12).r == pytest.approx(q.r1, rel=1e-12)
    with pytest.raises(InvalidParams):
        semi_hard_point(q, 0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 10), st.floats(-10, 10))
def test_plane_point_roundtrip(r, theta):
    p = PlanePoint(r, theta)
    back = PlanePoint.from_complex(p.z)
    assert back.r == pytest.approx(r, abs=1e-12)
