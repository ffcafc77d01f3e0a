"""End-to-end acceptance criteria.

Each ``test_criterion_<k>_*`` function is one criterion; the conftest hook
prints a PASS/FAIL line per criterion after the run.  Run just this file with

    python3 -m pytest tests/test_acceptance.py -q
"""

import functools
import json
import random

import numpy as np
import pytest

from rectisub.cli import main
from rectisub.exprdsl import format_spec, parse_immersion
from rectisub.exprdsl.evaluate import evaluate
from rectisub.geometry import codazzi_residual, curvature, snapshot
from rectisub.immersion import ConeOver, Cylinder, Graph, Helix, Plane, Torus, UnitSphere, parse_builtin, tilted_circle_base
from rectisub.jets import Jet, jet_constant, seed
from rectisub.rectify import (
    FrenetUndefined,
    classify,
    curve_curvature,
    frenet,
    make_grid,
    rectifying_curve_residual,
    sample_rows,
)

from oracles import ExprGenerator, ProgramGenerator, fd_partial, mp_eval, multi_indices, tensor_index

EXACT = 1e-8
THIRD = 1e-7
DEGENERATE = 1e-10
NONZERO = 1e-3


def _positive_family(count=10, seed_value=2024):
    rng = random.Random(seed_value)
    out = []
    for _ in range(count):
        c = rng.uniform(0.3, 3.0)
        m = rng.choice([4, 5])
        if rng.random() < 0.5:
            out.append(f"rectifying:c={c!r},base=small_circle,theta={rng.uniform(0.3, 1.3)!r},m={m}")
        else:
            a, b, d = (rng.uniform(0.5, 2.0) for _ in range(3))
            out.append(f"rectifying:c={c!r},base=ellipse,a={a!r},b={b!r},d={d!r},m={m}")
    return out


POSITIVE = _positive_family()
NEGATIVE = {"sphere": UnitSphere(2, 3), "torus": Torus(2.0, 1.0), "graph": Graph()}


@functools.cache
def verify_run(source: str, tmp: str):
    path = f"{tmp}/report.json"
    code = main(["verify", "--builtin", source, "--format", "json", "--out", path])
    with open(path, encoding="utf-8") as fh:
        return code, json.load(fh)


@pytest.fixture(scope="module")
def workdir(tmp_path_factory):
    return str(tmp_path_factory.mktemp("acceptance"))


# 1 ----------------------------------------------------------------------------


CORPUS = {
    "plane": Plane(),
    "sphere": UnitSphere(2, 3),
    "cylinder": Cylinder(2.0),
    "torus": Torus(2.0, 1.0),
    "graph": Graph("s^2 - u2^2"),
    "helix": Helix(3, 4),
    "cone": ConeOver(tilted_circle_base()),
}


@pytest.mark.parametrize("name", list(CORPUS))
def test_criterion_1_engine_self_consistency(name):
    imm = CORPUS[name]
    points = make_grid(imm).points()
    assert len(points) == 9**imm.chart_dim
    gauss = max(curvature(imm, p).residual() for p in points)
    codazzi = max(codazzi_residual(imm, p) for p in points)
    assert gauss <= THIRD, gauss
    assert codazzi <= THIRD, codazzi


# 2 ----------------------------------------------------------------------------


@pytest.mark.parametrize("source", POSITIVE)
def test_criterion_2_classification_round_trip(source, workdir):
    code, doc = verify_run(source, workdir)
    assert code == 0
    checks = {c["name"]: c for c in doc["checks"]}
    assert checks["rectifying"]["value"] <= EXACT

    imm = parse_builtin(source)
    c = imm.c
    y = imm.y_factor()
    worst_y = worst_g = 0.0
    for p in make_grid(imm).points():
        s = p[0]
        g_base = snapshot(imm.base, p[1:]).metric
        want_y = np.zeros((imm.chart_dim, imm.chart_dim))
        want_y[0, 0] = c * c / (s * s + c * c) ** 2
        want_y[1:, 1:] = s * s / (s * s + c * c) * g_base
        want_g = np.zeros_like(want_y)
        want_g[0, 0] = 1.0
        want_g[1:, 1:] = s * s * g_base
        worst_y = max(worst_y, np.max(np.abs(snapshot(y, p).metric - want_y)))
        worst_g = max(worst_g, np.max(np.abs(snapshot(imm, p).metric - want_g)))
    assert worst_y <= EXACT
    assert worst_g <= EXACT


# 3 ----------------------------------------------------------------------------


def _residual_columns(imm):
    header, rows = sample_rows(imm, make_grid(imm))
    rows = np.array(rows)
    return rows[:, header.index("rectifying_residual")], rows[:, header.index("concurrency_residual")]


@pytest.mark.parametrize("source", POSITIVE)
def test_criterion_3_concurrency_equivalence_positive(source):
    rect, conc = _residual_columns(parse_builtin(source))
    assert np.max(conc) <= EXACT
    assert np.max(rect) <= EXACT


@pytest.mark.parametrize("name", list(NEGATIVE))
def test_criterion_3_concurrency_equivalence_negative(name):
    rect, conc = _residual_columns(NEGATIVE[name])
    both = (rect >= NONZERO) & (conc >= NONZERO)
    assert np.mean(both) >= 0.9
    # the equivalence direction: neither residual vanishes grid-wide
    assert np.max(rect) > EXACT and np.max(conc) > EXACT


# 4 ----------------------------------------------------------------------------

STRUCTURE = {
    "normal_length_spread": EXACT,
    "shape_operator_xn": EXACT,
    "curvature_xt": THIRD,
    "sectional_xt": THIRD,
    "rho_gradient": EXACT,
    "norm_sq_fit": EXACT,
    "norm_sq_leading": EXACT,
    "connection_form": THIRD,
}


@pytest.mark.parametrize("source", POSITIVE + ["rectifying:c=1,base=circle"])
def test_criterion_4_structure_of_constructed_examples(source, workdir):
    _, doc = verify_run(source, workdir)
    checks = {c["name"]: c for c in doc["checks"]}
    for name, tol in STRUCTURE.items():
        value = checks[name]["value"]
        assert value is not None and value <= tol, (name, value)
    assert doc["constants"]["fit_leading"] == pytest.approx(1.0, abs=EXACT)


# 5 ----------------------------------------------------------------------------


def test_criterion_5_curves():
    helix = Helix(3, 4)
    for p in make_grid(helix).points():
        fa = frenet(helix, p)
        assert abs(fa.kappa - 0.12) <= 1e-10 and abs(fa.tau - 0.16) <= 1e-10

    curve = parse_builtin("rectifying_curve:c=1,base=small_circle")
    for p in make_grid(curve).points():
        res = rectifying_curve_residual(curve, p)
        x = curve.position(p)
        assert res.residual * (1 + np.linalg.norm(x)) <= EXACT

    line = parse_builtin("rectifying_curve:c=1,base=great_circle")
    for p in make_grid(line).points():
        assert curve_curvature(line, p) <= DEGENERATE
        with pytest.raises(FrenetUndefined):
            frenet(line, p)


def test_criterion_5_great_circle_cli(capsys):
    assert main(["frenet", "--builtin", "rectifying_curve:base=great_circle"]) == 1
    assert "Frenet frame undefined" in capsys.readouterr().err


# 6 ----------------------------------------------------------------------------


def test_criterion_6_classifiers():
    cone = classify(ConeOver(tilted_circle_base()))
    conic = {v.name: v for v in cone.verdicts}["conic"]
    assert conic.holds and conic.threshold == DEGENERATE
    sphere = classify(UnitSphere(2, 3))
    assert sphere.verdict("spherical") and not sphere.verdict("proper")


@pytest.mark.parametrize("source", POSITIVE)
def test_criterion_6_constructed_are_proper(source):
    imm = parse_builtin(source)
    rep = classify(imm)
    assert rep.verdict("proper") and rep.verdict("rectifying")
    # number of grid points where m > n + dim Im h fails
    assert rep.entry("codimension").value == 0
    assert imm.ambient_dim > imm.chart_dim + rep.constants["max_im_h_dim"]


# 7 ----------------------------------------------------------------------------


def test_criterion_7_jets_against_differences():
    rng = random.Random(7)
    failures = []
    for k in range(200):
        n = rng.choice([1, 2, 3])
        names = ("s", "u2", "u3")[:n]
        expr = ExprGenerator(rng, names).expr(3)
        point = [rng.uniform(-1, 1) for _ in range(n)]
        j = evaluate(expr, dict(zip(names, seed(point, 3))))
        if not isinstance(j, Jet):
            j = jet_constant(j, n, 3)
        f = lambda q: mp_eval(expr, dict(zip(names, q)))  # noqa: E731
        for alpha in multi_indices(n):
            order = sum(alpha)
            got = float(np.asarray(j.derivative(order))[tensor_index(alpha)]) if order else j.value
            want = float(fd_partial(f, point, alpha, step=1e-4))
            if not abs(got - want) <= 1e-5 * max(1.0, abs(want)):
                failures.append((k, alpha, got, want))
    assert not failures, failures[:5]


# 8 ----------------------------------------------------------------------------

COMMANDS = [
    ["verify", "--builtin", "rectifying:base=ellipse,m=4"],
    ["verify", "--builtin", "torus", "--format", "json"],
    ["classify", "--builtin", "cone"],
    ["classify", "--builtin", "graph", "--format", "json"],
    ["frenet", "--builtin", "helix"],
    ["frenet", "--builtin", "rectifying_curve", "--format", "json"],
    ["sample", "--builtin", "rectifying:base=small_circle"],
    ["construct", "--c", "2", "--base", "ellipse", "--m", "5"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: "-".join(a[:3]))
def test_criterion_8_parallel_runs_identical(argv, tmp_path):
    outputs = []
    for jobs in ("1", "8"):
        path = tmp_path / f"out{jobs}"
        code = main(argv + ["--jobs", jobs, "--out", str(path)])
        outputs.append((code, path.read_bytes()))
    assert outputs[0] == outputs[1]
    assert outputs[0][1]


def test_criterion_8_dsl_fixpoint():
    for k in range(100):
        spec = ProgramGenerator(random.Random(k), ()).program()
        text = format_spec(spec)
        again = parse_immersion(text)
        assert again == spec
        assert format_spec(again) == text
