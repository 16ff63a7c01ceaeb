"""Write the diagnostic tables for every figure scenario into one directory.

    python scripts/reproduce_figures.py --out results/figures
"""
import argparse
import pathlib
from dataclasses import dataclass

from hardwall.cli import DEFAULT_GRID, FIGURES, figure_diag, stabilizes, write_rows


@dataclass
class FigureRun:
    out_dir: pathlib.Path = pathlib.Path("results/figures")
    n_grid: tuple = DEFAULT_GRID
    figures: tuple = FIGURES
    workers: int = 4


def run(cfg):
    cfg.out_dir.mkdir(parents=True, exist_ok=True)
    for which in cfg.figures:
        rows = figure_diag(which, n_grid=cfg.n_grid, workers=cfg.workers)
        path = cfg.out_dir / f"{which}.csv"
        write_rows(path, rows)
        diag = [r.diagnostic for r in rows]
        _, jump, med = stabilizes(diag)
        print(f"{which:12s} last={diag[-1]: .6g}  tail jump={jump:.3g} median={med:.3g}  -> {path}")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=pathlib.Path, default=FigureRun.out_dir)
    ap.add_argument("--n-grid", help="comma separated, ascending")
    ap.add_argument("--only", choices=FIGURES, action="append")
    args = ap.parse_args()
    cfg = FigureRun(out_dir=args.out)
    if args.n_grid:
        cfg.n_grid = tuple(int(v) for v in args.n_grid.split(","))
    if args.only:
        cfg.figures = tuple(args.only)
    run(cfg)


if __name__ == "__main__":
    main()
