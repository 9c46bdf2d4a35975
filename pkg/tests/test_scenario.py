import json
import math

import numpy as np
import pytest

from maslovkit.errors import InvalidInputError, ScenarioError
from maslovkit.scenario import MODELS, CurvatureProfile, Scenario, builtin_model


def base(**over):
    d = {
        "name": "t",
        "dimension": 2,
        "signature": [1, 1],
        "curvature": {"kind": "constant", "coefficients": [[0, 0], [0, -1]]},
        "interval": [0, 1],
        "step": 0.01,
    }
    d.update(over)
    return d


def field_of(excinfo):
    return excinfo.value.field


def test_round_trip(tmp_path):
    sc = Scenario.from_dict(base(subintervals=[[0.5, 1.0]], shifted_points=[-1.0], notes="x"))
    p = tmp_path / "s.json"
    sc.dump(p)
    again = Scenario.load(p)
    assert again == sc
    assert again.to_json() == sc.to_json()


@pytest.mark.parametrize("over,field", [
    ({"signature": [1, 2]}, "signature[1]"),
    ({"signature": [1]}, "signature"),
    ({"dimension": 0}, "dimension"),
    ({"interval": [1, 0]}, "interval"),
    ({"step": 2.0}, "step"),
    ({"step": True}, "step"),
    ({"seed": -1}, "seed"),
    ({"bogus": 1}, "bogus"),
    ({"curvature": {"kind": "wavelet", "coefficients": []}}, "curvature.kind"),
    ({"curvature": {"kind": "constant", "coefficients": [[0, 1], [0, 0]]}}, "curvature.coefficients"),
    ({"curvature": {"kind": "polynomial", "coefficients": [[[0, 0], [0, 0]], [[0, 1], [0, 0]]]}},
     "curvature.coefficients[1]"),
    ({"curvature": {"kind": "diagonal-profile", "coefficients": [[0]]}}, "curvature.coefficients"),
    ({"curvature": {"kind": "fourier", "coefficients": {"cos": [[[0, 1], [2, 0]]]}}},
     "curvature.coefficients.cos[0]"),
    ({"subintervals": [[0.0, 0.5]]}, "subintervals[0]"),
    ({"shifted_points": [0.5]}, "shifted_points[0]"),
    ({"submanifold": {"P": [[1, 0]], "S": [[0]]}}, "submanifold"),
    ({"submanifold": {"P": [[0, 1]], "S": [[0, 0]]}}, "submanifold.S"),
])
def test_field_diagnostics(over, field):
    with pytest.raises(ScenarioError) as e:
        Scenario.from_dict(base(**over))
    assert field_of(e) == field
    assert str(e.value).startswith(field + ":")


def test_missing_field():
    d = base()
    del d["curvature"]
    with pytest.raises(ScenarioError) as e:
        Scenario.from_dict(d)
    assert field_of(e) == "curvature"


def test_json_syntax_error_reports_line():
    with pytest.raises(ScenarioError) as e:
        Scenario.from_json('{\n  "name": "x",\n  "dimension": 2,,\n}')
    assert field_of(e) == "line 3"


def test_scenario_error_is_invalid_input():
    assert issubclass(ScenarioError, InvalidInputError)


def test_lorentzian_g_symmetric_curvature_is_accepted():
    sc = Scenario.from_dict(base(signature=[-1, 1], curvature={"kind": "constant", "coefficients": [[0, 1], [-1, 0]]}))
    assert sc.system().n_minus == 1


def test_curvature_kinds_evaluate():
    g = np.ones(2)
    poly = CurvatureProfile("polynomial", [[[0, 0], [0, -1]], [[0, 0], [0, 2]]], 2).build(g)
    assert np.allclose(poly(0.5), [[0, 0], [0, 0]])
    diag = CurvatureProfile("diagonal-profile", [[0], [1, 0, -1]], 2).build(g)
    assert np.allclose(diag(2.0), np.diag([0, -3]))
    four = CurvatureProfile("fourier", {"frequency": 2.0, "constant": [[0, 0], [0, -1]],
                                        "cos": [[[0, 0], [0, 1]]], "sin": [[[0, 0], [0, 0.5]]]}, 2).build(g)
    t = 0.3
    assert four(t)[1, 1] == pytest.approx(-1 + math.cos(2 * t) + 0.5 * math.sin(2 * t))


@pytest.mark.parametrize("name", MODELS)
def test_builtin_models(name):
    sc = builtin_model(name, 3)
    assert sc.name == name
    assert Scenario.from_json(sc.to_json()) == sc


def test_builtin_model_validation():
    with pytest.raises(InvalidInputError):
        builtin_model("torus")
    with pytest.raises(InvalidInputError):
        builtin_model("lorentz-const", 1)


def test_bundled_scenario_files_load():
    import pathlib

    root = pathlib.Path(__file__).resolve().parents[1] / "scenarios"
    files = sorted(root.glob("*.json"))
    assert files
    for f in files:
        sc = Scenario.load(f)
        assert json.loads(sc.to_json())["name"] == sc.name
