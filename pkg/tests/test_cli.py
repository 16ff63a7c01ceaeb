import csv
import json

import pytest

from conftest import figure_params
from hardwall.cli import (DEFAULT_GRID, DiagnosticRow, figure_diag, main, selftest, stabilizes,
                          trend_slope)
from hardwall.errors import InvalidParams
from hardwall.kernel import kernel_value
from hardwall.model import equilibrium, hard_edge_point


def test_single_row_grid():
    rows = figure_diag("fig4_left", n_grid=[64])
    assert len(rows) == 1 and isinstance(rows[0], DiagnosticRow)
    assert rows[0].wall_time_ms > 0


def test_rows_ordered_by_n():
    grid = [64, 128, 256, 512]
    assert [r.n for r in figure_diag("fig5_left", n_grid=grid)] == grid


@pytest.mark.parametrize("grid", [[], [16, 64], [128, 64]])
def test_bad_grids(grid):
    with pytest.raises(InvalidParams):
        figure_diag("fig4_left", n_grid=grid)


def test_unknown_figure():
    with pytest.raises(InvalidParams):
        figure_diag("fig9", n_grid=[64])


def test_exact_is_hermitian_consistent():
    for row in figure_diag("fig5_right", n_grid=[128, 256]):
        p = figure_params(row.n)
        eq = equilibrium(p)
        z = hard_edge_point(p, eq, 0.91, 0.0)
        w = hard_edge_point(p, eq, 1.45, 0.312)
        assert abs(kernel_value(p, w, z).conjugate() - row.exact) <= 1e-12 * abs(row.exact)


def test_fig4_left_row_formula():
    row = figure_diag("fig4_left", n_grid=[300])[0]
    import math
    assert row.diagnostic == pytest.approx((row.exact - row.predicted).real / math.log(300), rel=1e-14)
    assert row.exact.imag == 0 or abs(row.exact.imag) <= 1e-8 * abs(row.exact)


def test_stabilizes_rule():
    ok, jump, med = stabilizes([5, 1.0, 1.1, 1.05, 1.0])
    assert ok and jump == pytest.approx(0.1) and med == pytest.approx(1.05 * 0.5 + 1.0 * 0.5, rel=0.05)
    assert not stabilizes([1.0, 2.0, 1.0, 2.0])[0]
    assert trend_slope([10, 100, 1000], [3, 2, 1]) < 0


def test_default_grid():
    assert DEFAULT_GRID == (256, 362, 512, 724, 1024, 1448, 2048, 2896, 4096)


def test_eval_kernel_json(capsys):
    assert main(["eval-kernel", "--b", "1.3", "--alpha", "1.26", "--r1-frac", "0.42", "--r2-frac", "0.67",
                 "--n", "16", "--z", "0.2,0.1", "--w", "0.7,-0.3", "--json"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"value_re", "value_im", "breakdown", "error_order"}
    ref = kernel_value(figure_params(16), (0.2, 0.1), (0.7, -0.3))
    assert complex(out["value_re"], out["value_im"]) == ref


def test_eval_kernel_absolute_radii(capsys):
    assert main(["eval-kernel", "--b", "1", "--alpha", "0", "--r1", "0.3", "--r2", "0.5", "--n", "4",
                 "--z", "0.1,0", "--w", "0.1,0"]) == 0
    assert capsys.readouterr().out


def test_eval_kernel_mixed_radii_rejected(capsys):
    assert main(["eval-kernel", "--r1", "0.3", "--r2-frac", "0.5", "--n", "4", "--z", "0.1,0", "--w", "0.1,0"]) == 2


@pytest.mark.parametrize("args", [
    ["--theorem", "1.1", "--t1", "0.21", "--t2", "0.45"],
    ["--theorem", "1.2", "--s1", "1.21", "--s2", "1.45"],
    ["--theorem", "1.3", "--t1", "0.21", "--t2", "0.45", "--theta2", "0.312"],
    ["--theorem", "1.4", "--t1", "0.91", "--t2", "1.45", "--theta2", "0.312"],
])
def test_predict(capsys, args):
    assert main(["predict", *args, "--n", "1024"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) == {"value_re", "value_im", "breakdown", "error_order"}
    total = sum(complex(*v) for v in out["breakdown"].values())
    assert total == pytest.approx(complex(out["value_re"], out["value_im"]), rel=1e-14)


def test_predict_missing_scenario(capsys):
    assert main(["predict", "--theorem", "1.2", "--n", "64"]) == 2


def test_figure_csv(tmp_path, capsys):
    out = tmp_path / "fig.csv"
    assert main(["figure", "--which", "thm15", "--n-grid", "64,128", "--out", str(out)]) == 0
    rows = list(csv.reader(out.read_text().splitlines()))
    assert rows[0][0] == "n" and [r[0] for r in rows[1:]] == ["64", "128"]


def test_sample_csv(tmp_path):
    out = tmp_path / "s.csv"
    assert main(["sample", "--n", "32", "--seed", "4", "--out", str(out)]) == 0
    assert out.read_text().startswith("j,r,theta,x,y\n")


def test_integrals(capsys):
    assert main(["integrals"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert abs(out["residuals"]["I4"]) < 1e-9 and -0.81372 <= out["I"] <= -0.81362


def test_selftest_quick(capsys):
    report = selftest("quick")
    assert all(ok for _, ok, _ in report)
    assert main(["selftest"]) == 0
    assert "checks passed" in capsys.readouterr().out
