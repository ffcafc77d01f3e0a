"""Grid sampling, classification verdicts and the rectifying property report."""

from __future__ import annotations

import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat

import numpy as np

from .frenet import FrenetUndefined, curve_curvature, frenet, rectifying_curve_residual
from .residuals import point_checks

DEFAULT_GRID = 9
GRID_SHRINK = 0.05


@dataclass(frozen=True)
class Tolerances:
    exact: float = 1e-8  # identities exact in the jets
    third: float = 1e-7  # identities through third derivatives
    degenerate: float = 1e-10  # conic / spherical / properness thresholds

    def __post_init__(self):
        for name in ("exact", "third", "degenerate"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ValueError(f"tolerance {name} must be positive, got {v!r}")


# grids ---------------------------------------------------------------------


@dataclass(frozen=True)
class Grid:
    sizes: tuple[int, ...]
    bounds: tuple[tuple[float, float], ...]
    shrink: float = GRID_SHRINK

    def axes(self) -> list[np.ndarray]:
        return [np.linspace(lo, hi, k) for (lo, hi), k in zip(self.bounds, self.sizes)]

    def points(self) -> list[tuple[float, ...]]:
        """Lexicographic order, first chart variable slowest."""
        return [tuple(float(v) for v in p) for p in itertools.product(*self.axes())]

    def __len__(self) -> int:
        return math.prod(self.sizes)

    def describe(self) -> dict:
        return {
            "sizes": list(self.sizes),
            "shrink": self.shrink,
            "points": len(self),
            "bounds": [list(b) for b in self.bounds],
        }


def make_grid(imm, sizes=None, shrink: float = GRID_SHRINK) -> Grid:
    """Uniform grid over the chart box, pulled in by ``shrink`` of each side."""
    n = imm.chart_dim
    if sizes is None:
        sizes = (DEFAULT_GRID,) * n
    elif isinstance(sizes, int):
        sizes = (sizes,) * n
    else:
        sizes = tuple(int(k) for k in sizes)
        if len(sizes) == 1:
            sizes = sizes * n
    if len(sizes) != n:
        raise ValueError(f"grid has {len(sizes)} sizes but the chart has dimension {n}")
    if any(k < 2 for k in sizes):
        raise ValueError(f"grid sizes must be at least 2, got {list(sizes)}")
    bounds = []
    for lo, hi in imm.domain:
        pad = shrink * (hi - lo)
        bounds.append((float(lo + pad), float(hi - pad)))
    return Grid(tuple(sizes), tuple(bounds), shrink)


def map_points(func, imm, points, jobs: int = 1) -> list:
    """``[func(imm, p) for p in points]``, optionally across processes, in order."""
    if jobs <= 1 or len(points) < 2:
        return [func(imm, p) for p in points]
    chunk = max(1, len(points) // (4 * jobs))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(func, repeat(imm), points, chunksize=chunk))


# reports -------------------------------------------------------------------


@dataclass
class Entry:
    name: str
    description: str
    value: float
    tolerance: float
    applicable: bool = True

    @property
    def verdict(self) -> str:
        if not self.applicable or not math.isfinite(self.value):
            return "n/a"
        return "pass" if self.value <= self.tolerance else "fail"


@dataclass
class Verdict:
    name: str
    holds: bool
    value: float
    threshold: float
    rule: str


@dataclass
class VerificationReport:
    subject: str
    chart_dim: int
    ambient_dim: int
    grid: dict
    verdicts: list[Verdict] = field(default_factory=list)
    entries: list[Entry] = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)

    def verdict(self, name: str) -> bool:
        for v in self.verdicts:
            if v.name == name:
                return v.holds
        raise KeyError(name)

    def entry(self, name: str) -> Entry:
        for e in self.entries:
            if e.name == name:
                return e
        raise KeyError(name)

    @property
    def summary(self) -> str:
        kinds = [k for k in ("conic", "spherical") if self._has(k)]
        shape = ", ".join(kinds) if kinds else "neither conic nor spherical"
        if self._has("proper") and self._has("rectifying"):
            return f"{shape}; proper rectifying on sampled grid"
        if self._has("rectifying"):
            return f"{shape}; rectifying but not proper on sampled grid"
        if self._has("proper"):
            return f"{shape}; proper but not rectifying on sampled grid"
        return f"{shape}; not proper rectifying on sampled grid"

    def _has(self, name: str) -> bool:
        try:
            return self.verdict(name)
        except KeyError:
            return False

    @property
    def passed(self) -> bool:
        """All applicable checks pass and the subject is proper rectifying."""
        checks_ok = all(e.verdict != "fail" for e in self.entries)
        return checks_ok and self._has("proper") and self._has("rectifying")

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "dimensions": {"chart": self.chart_dim, "ambient": self.ambient_dim},
            "grid": self.grid,
            "classification": {
                "summary": self.summary,
                "verdicts": [
                    {"name": v.name, "holds": v.holds, "value": v.value, "threshold": v.threshold, "rule": v.rule}
                    for v in self.verdicts
                ],
            },
            "checks": [
                {
                    "name": e.name,
                    "description": e.description,
                    "value": e.value,
                    "tolerance": e.tolerance,
                    "verdict": e.verdict,
                }
                for e in self.entries
            ],
            "constants": self.constants,
            "notes": self.notes,
            "passed": self.passed,
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())

    def to_text(self) -> str:
        d = self.to_dict()
        g = d["grid"]
        lines = [
            f"subject: {self.subject}",
            f"dimensions: n={self.chart_dim}, m={self.ambient_dim}",
            f"grid: {' x '.join(str(k) for k in g['sizes'])} = {g['points']} points, shrink {g['shrink']:g}",
            f"classification: {self.summary}",
        ]
        for v in d["classification"]["verdicts"]:
            lines.append(f"  {v['name']:<12} {'yes' if v['holds'] else 'no':<4} {fmt3(v['value']):>10}  ({v['rule']})")
        if self.entries:
            lines.append("checks:")
            width = max(len(e.name) for e in self.entries)
            for e in self.entries:
                lines.append(
                    f"  {e.name:<{width}}  {fmt3(e.value):>10}  tol {fmt3(e.tolerance):<7} {e.verdict:<4}  {e.description}"
                )
        if self.constants:
            lines.append("constants:")
            for k, v in self.constants.items():
                lines.append(f"  {k} = {fmt3(v)}")
        for note in self.notes:
            lines.append(f"note: {note}")
        lines.append(f"result: {'PASS' if self.passed else 'FAIL'}")
        return "\n".join(lines) + "\n"


def fmt3(v) -> str:
    if v is None or (isinstance(v, float) and not math.isfinite(v)):
        return "n/a"
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, (int, str)):
        return str(v)
    return f"{v:.3g}"


def _json_value(v, indent: int) -> str:
    pad = "  " * indent
    if v is None:
        return "null"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.16e}" if math.isfinite(v) else "null"
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, dict):
        if not v:
            return "{}"
        items = [f"{pad}  {json.dumps(str(k))}: {_json_value(x, indent + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        if all(not isinstance(x, (dict, list, tuple)) for x in v):
            return "[" + ", ".join(_json_value(x, indent + 1) for x in v) + "]"
        items = [f"{pad}  {_json_value(x, indent + 1)}" for x in v]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if isinstance(v, np.generic):
        return _json_value(v.item(), indent)
    raise TypeError(f"cannot serialize {type(v).__name__}")


def dump_json(obj) -> str:
    """JSON with every float written to 17 significant digits; NaN becomes null."""
    return _json_value(obj, 0) + "\n"


# classification and the property report -------------------------------------


def _max(records, key) -> float:
    vals = [r[key] for r in records]
    return float(max(vals)) if vals else float("nan")


def _nanmax(records, key) -> float:
    vals = [r[key] for r in records if math.isfinite(r[key])]
    return float(max(vals)) if vals else float("nan")


def _classify(imm, grid: Grid, tol: Tolerances, records: list[dict]) -> VerificationReport:
    if not records:
        raise ValueError("empty grid")
    nu_rel = [r["nu"] / (1.0 + r["x_norm"]) for r in records]
    rho_rel = [r["rho"] / (1.0 + r["x_norm"]) for r in records]
    rect = _max(records, "rectifying")
    conc = _max(records, "concurrency")
    conic = max(nu_rel) < tol.degenerate
    spherical = max(rho_rel) < tol.degenerate
    low = min(min(a, b) for a, b in zip(nu_rel, rho_rel))
    proper = low > tol.degenerate
    report = VerificationReport(
        subject=imm.label,
        chart_dim=imm.chart_dim,
        ambient_dim=imm.ambient_dim,
        grid=grid.describe(),
        verdicts=[
            Verdict("conic", conic, max(nu_rel), tol.degenerate, "max |x^N|/(1+|x|) below threshold"),
            Verdict("spherical", spherical, max(rho_rel), tol.degenerate, "max |x^T|/(1+|x|) below threshold"),
            Verdict("proper", proper, low, tol.degenerate, "min of |x^T|, |x^N| over (1+|x|) above threshold"),
            Verdict("rectifying", rect < tol.exact, rect, tol.exact, "max rectifying residual below threshold"),
            Verdict("concurrent", conc < tol.exact, conc, tol.exact, "max concurrency residual below threshold"),
        ],
    )
    report.entries.append(Entry("rectifying", "<x, h(e_i, e_j)> = 0", rect, tol.exact))
    report.entries.append(Entry("concurrency", "nabla_Z x^T = Z", conc, tol.exact))
    proper_rect = proper and rect < tol.exact
    bad = [r["point"] for r in records if not r["codim_ok"]]
    report.entries.append(
        Entry("codimension", "points violating m > n + dim Im h", float(len(bad)), 0.0, applicable=proper_rect)
    )
    report.constants["max_im_h_dim"] = int(max(r["im_h_dim"] for r in records))
    if proper_rect and bad:
        report.notes.append(f"codimension bound fails at {len(bad)} points, first at {bad[0]}")
    return report


def classify(imm, grid: Grid | None = None, tol: Tolerances = Tolerances(), jobs: int = 1) -> VerificationReport:
    grid = grid or make_grid(imm)
    return _classify(imm, grid, tol, map_points(point_checks, imm, grid.points(), jobs))


def _norm_sq_fit(imm, records, tol: Tolerances):
    """Quadratic fit of |x|^2 against the chart coordinate s, or against rho."""
    s = np.array([r["point"][0] for r in records])
    rho = np.array([r["rho"] for r in records])
    offset = rho - s
    use_s = bool(getattr(imm, "arclength_chart", False)) or float(np.std(offset)) <= tol.exact
    sigma = s if use_s else rho
    data = np.array([r["x_sq"] for r in records])
    design = np.stack([sigma * sigma, sigma, np.ones_like(sigma)], axis=1)
    coef, *_ = np.linalg.lstsq(design, data, rcond=None)
    fit_res = float(np.max(np.abs(design @ coef - data)))
    b = float(np.mean(offset)) if use_s else None
    return use_s, b, [float(v) for v in coef], fit_res


def property_report(imm, grid: Grid | None = None, tol: Tolerances = Tolerances(), jobs: int = 1) -> VerificationReport:
    """Classification plus every structural property of proper rectifying submanifolds.

    When the subject is not proper rectifying the values are still computed
    where defined, but the items are marked not applicable.
    """
    grid = grid or make_grid(imm)
    records = map_points(point_checks, imm, grid.points(), jobs)
    report = _classify(imm, grid, tol, records)
    ok = report.verdict("proper") and report.verdict("rectifying")

    use_s, b, (lead, c1, c2), fit_res = _norm_sq_fit(imm, records, tol)
    nus = np.array([r["nu"] for r in records])
    items = [
        ("rho_gradient", "e_1(rho) = 1, e_j(rho) = 0 for j >= 2", _nanmax(records, "e_rho"), tol.exact),
        ("norm_sq_fit", "|x|^2 quadratic in the distance coordinate", fit_res, tol.exact),
        ("norm_sq_leading", "leading coefficient of the |x|^2 fit is 1", abs(lead - 1.0), tol.exact),
        ("normal_length_spread", "standard deviation of |x^N|", float(np.std(nus)), tol.exact),
        ("shape_operator_xn", "operator norm of A_{x^N}", _nanmax(records, "a_xn"), tol.exact),
        ("curvature_xt", "max |R(x^T, Y, Z, W)| over frame vectors", _nanmax(records, "r_xt"), tol.third),
        ("sectional_xt", "max |K(x^T ^ Z)| over frame Z orthogonal to x^T", _nanmax(records, "k_xt"), tol.third),
        ("connection_form", "omega_1^j(e_i) = delta_ij / rho", _nanmax(records, "omega"), tol.third),
        ("normal_derivative_xn", "D_Z x^N + h(Z, x^T) = 0", _nanmax(records, "dxn"), tol.exact),
        ("tangent_derivative_xt", "A_{x^N} Z = nabla_Z x^T - Z", _nanmax(records, "weingarten"), tol.exact),
    ]
    for name, desc, value, t in items:
        report.entries.append(Entry(name, desc, value, t, applicable=ok))
    report.entries.append(Entry("codazzi", "engine: symmetry of nabla-bar h", _max(records, "codazzi"), tol.third))
    report.entries.append(Entry("gauss", "engine: intrinsic vs extrinsic curvature", _max(records, "gauss"), tol.third))

    report.constants.update(
        {
            "b": b,
            "fit_variable": "s" if use_s else "rho",
            "fit_leading": lead,
            "c1": c1,
            "c2": c2,
            "c": float(np.mean(nus)),
        }
    )
    if n_undef := sum(1 for r in records if not math.isfinite(r["e_rho"])):
        report.notes.append(f"e_1 = x^T/|x^T| undefined at {n_undef} of {len(records)} points")
    if not ok:
        report.notes.append("structural items not applicable: subject is not proper rectifying on the sampled grid")
    return report


# curves --------------------------------------------------------------------


def _frenet_row(curve, p) -> dict:
    row = {"s": float(p[0])}
    try:
        fa = frenet(curve, p)
        res = rectifying_curve_residual(curve, p)
    except FrenetUndefined as exc:
        row.update(kappa=exc.kappa, tau=None, lam=None, mu=None, residual=None, defined=False)
        return row
    row.update(kappa=fa.kappa, tau=fa.tau, lam=res.lam, mu=res.mu, residual=res.residual, defined=True)
    return row


@dataclass
class FrenetReport:
    subject: str
    grid: dict
    rows: list[dict]
    tolerance: float

    @property
    def degenerate(self) -> list[float]:
        return [r["s"] for r in self.rows if not r["defined"]]

    @property
    def rectifying(self) -> bool:
        return not self.degenerate and all(r["residual"] <= self.tolerance for r in self.rows)

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "grid": self.grid,
            "rows": [
                {
                    "s": r["s"],
                    "kappa": r["kappa"],
                    "tau": r["tau"],
                    "lambda": r["lam"],
                    "mu": r["mu"],
                    "rectifying_residual": r["residual"],
                    "frenet_defined": r["defined"],
                }
                for r in self.rows
            ],
            "tolerance": self.tolerance,
            "degenerate_points": self.degenerate,
            "rectifying_curve": self.rectifying,
        }

    def to_json(self) -> str:
        return dump_json(self.to_dict())

    def to_text(self) -> str:
        lines = [f"subject: {self.subject}", f"grid: {self.grid['points']} points"]
        lines.append(f"  {'s':>10} {'kappa':>10} {'tau':>10} {'lambda':>10} {'mu':>10} {'residual':>10}")
        for r in self.rows:
            cells = [r["s"], r["kappa"], r["tau"], r["lam"], r["mu"], r["residual"]]
            line = "  " + " ".join(f"{fmt3(c):>10}" for c in cells)
            if not r["defined"]:
                line += "  Frenet frame undefined"
            lines.append(line)
        if self.degenerate:
            lines.append(f"Frenet frame undefined at {len(self.degenerate)} points (curvature <= 1e-10)")
        lines.append(f"rectifying curve: {'yes' if self.rectifying else 'no'} on sampled grid")
        return "\n".join(lines) + "\n"


def frenet_report(curve, grid: Grid | None = None, tol: Tolerances = Tolerances(), jobs: int = 1) -> FrenetReport:
    grid = grid or make_grid(curve)
    rows = map_points(_frenet_row, curve, grid.points(), jobs)
    return FrenetReport(curve.label, grid.describe(), rows, tol.exact)


# sampling ------------------------------------------------------------------


def sample_rows(imm, grid: Grid | None = None, jobs: int = 1) -> tuple[list[str], list[list[float]]]:
    """Header and rows for the CSV export, in grid order."""
    grid = grid or make_grid(imm)
    records = map_points(point_checks, imm, grid.points(), jobs)
    header = list(imm.variables) + [f"x{k + 1}" for k in range(imm.ambient_dim)]
    header += ["rho", "nu", "rectifying_residual", "concurrency_residual"]
    rows = [r["point"] + r["x"] + [r["rho"], r["nu"], r["rectifying"], r["concurrency"]] for r in records]
    return header, rows


__all__ = [
    "DEFAULT_GRID",
    "Entry",
    "FrenetReport",
    "Grid",
    "Tolerances",
    "Verdict",
    "VerificationReport",
    "classify",
    "curve_curvature",
    "dump_json",
    "frenet_report",
    "make_grid",
    "map_points",
    "property_report",
    "sample_rows",
]
