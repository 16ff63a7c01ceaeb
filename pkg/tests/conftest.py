import json
import pathlib
import sys

import pytest

HERE = pathlib.Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from hardwall.model import ModelParams, equilibrium  # noqa: E402


@pytest.fixture(scope="session")
def oracle():
    raw = json.loads((HERE / "oracle_values.json").read_text())

    def num(v):
        if isinstance(v, list):
            return [num(x) for x in v]
        if isinstance(v, dict):
            return {k: num(x) for k, x in v.items()}
        return float(v)
    return {k: (v if k == "kernels" else num(v)) for k, v in raw.items()}


def figure_params(n=1024):
    return ModelParams.from_fractions(1.3, 1.26, 0.42, 0.67, n)


@pytest.fixture
def fig_params():
    p = figure_params()
    return p, equilibrium(p)
