"""
Configuration-driven sweeps over a family of quotient actions.

A config is one JSON document.  Either a single sweep::

    {"family": "torus", "params": {"k": 2, "n": [8, 16]}, "R": [2, 4],
     "gamma_d": 2, "homology": true, "two_route": true, "workers": 2}

or several, sharing the switches::

    {"sweeps": [{"family": "torus", "params": {"n": [8]}, "R": [2]},
                {"family": "heisenberg", "params": {"n": [2, 3]}, "R": [2]}]}

Every (parameter, R) cell is an independent task.  Rows come back in canonical
order whatever the worker count, so the CSV is byte-stable.
"""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .farber import gamma_sum
from .groupoid import abelian_rank_lower_bound, correction_set, label_rewiring, rank_upper_bound
from .groups import FAMILIES, heisenberg_group, make_action, sl3_group, torus_group
from .homology import (
    abelianized_matrix, log_int, rewired_complex, schreier_presentation,
    smith_normal_form, within_hadamard,
)
from .rewire import UNBOUNDED, build_rewiring
from .schreier import build_schreier

FIELDS = (
    "family", "params", "index", "R", "edges_G", "edges_H", "density", "density_decimal",
    "dL_measured", "dL_budget", "bad_fraction", "degenerate", "correction_size",
    "rank_upper", "rank_lower_ab", "betti", "trs", "log_trs_over_index", "gamma_d",
    "runtime_ms", "routes_agree", "error",
)

SIZE_KEY = {"torus": "n", "heisenberg": "n", "sl3z-principal": "p", "sl3z-projective": "p"}
EXTRA_KEYS = {"torus": {"k"}, "heisenberg": set(), "sl3z-principal": {"order"},
              "sl3z-projective": {"order"}}

SWEEP_KEYS = {"family", "params", "R", "gamma_d"}
TOP_KEYS = SWEEP_KEYS | {"sweeps", "homology", "two_route", "output", "workers", "timings"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Sweep:
    family: str
    params: dict
    R: tuple
    gamma_d: int | None = None

    @property
    def sizes(self):
        return self.params[SIZE_KEY[self.family]]


@dataclass(frozen=True)
class ExperimentConfig:
    sweeps: tuple
    homology: bool = True
    two_route: bool = False
    output: str | None = None
    workers: int = 1
    timings: bool = False

    def cells(self):
        """Tasks in canonical order: sweep, then parameter, then R."""
        out = []
        for sw in self.sweeps:
            fixed = {k: v for k, v in sw.params.items() if k != SIZE_KEY[sw.family]}
            for size in sw.sizes:
                for R in sw.R:
                    out.append(Cell(sw.family, {**fixed, SIZE_KEY[sw.family]: size}, R, sw.gamma_d,
                                    self.homology, self.two_route, self.timings))
        return out


@dataclass(frozen=True)
class Cell:
    family: str
    params: dict
    R: int
    gamma_d: int | None
    homology: bool
    two_route: bool
    timings: bool

    def label(self):
        return ";".join(f"{k}={_fmt_param(v)}" for k, v in sorted(self.params.items()))


def _fmt_param(v):
    if isinstance(v, (list, tuple)):
        return "(" + ",".join(_fmt_param(x) for x in v) + ")"
    return str(v)


def _parse_sweep(doc, where):
    unknown = set(doc) - SWEEP_KEYS
    if unknown:
        raise ConfigError(f"{where}: unknown keys {sorted(unknown)}")
    family = doc.get("family")
    if family not in SIZE_KEY:
        raise ConfigError(f"{where}: family must be one of {', '.join(FAMILIES)}, got {family!r}")
    params = dict(doc.get("params", {}))
    size_key = SIZE_KEY[family]
    extra = set(params) - {size_key} - EXTRA_KEYS[family]
    if extra:
        raise ConfigError(f"{where}: unknown parameters {sorted(extra)} for {family}")
    sizes = params.get(size_key)
    if isinstance(sizes, int) and not isinstance(sizes, bool):
        sizes = [sizes]
    if not isinstance(sizes, list) or not sizes or not all(
            isinstance(s, int) and not isinstance(s, bool) for s in sizes):
        raise ConfigError(f"{where}: params.{size_key} must be a nonempty list of integers")
    params[size_key] = tuple(sizes)
    if family == "torus":
        k = params.setdefault("k", 2)
        if not isinstance(k, int) or isinstance(k, bool) or k < 2:
            raise ConfigError(f"{where}: torus rank k must be an integer >= 2")
    if "order" in params:
        params["order"] = tuple(tuple(pair) for pair in params["order"])
    R = doc.get("R")
    if not isinstance(R, list) or not R:
        raise ConfigError(f"{where}: R schedule must be a nonempty list")
    for r in R:
        if not isinstance(r, int) or isinstance(r, bool) or r < 2 or r % 2:
            raise ConfigError(f"{where}: R values must be even integers >= 2, got {r!r}")
    gd = doc.get("gamma_d")
    if gd is not None and (not isinstance(gd, int) or isinstance(gd, bool) or gd < 0):
        raise ConfigError(f"{where}: gamma_d must be a non-negative integer")
    return Sweep(family, params, tuple(R), gd)


def parse_config(doc):
    """Validate a decoded JSON document into an ExperimentConfig."""
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}")
    if "sweeps" in doc:
        if SWEEP_KEYS & set(doc):
            raise ConfigError("give either 'sweeps' or a single family block, not both")
        if not isinstance(doc["sweeps"], list) or not doc["sweeps"]:
            raise ConfigError("'sweeps' must be a nonempty list")
        sweeps = tuple(_parse_sweep(s, f"sweeps[{j}]") for j, s in enumerate(doc["sweeps"]))
    else:
        sweeps = (_parse_sweep({k: doc[k] for k in SWEEP_KEYS if k in doc}, "config"),)
    workers = doc.get("workers", 1)
    if not isinstance(workers, int) or isinstance(workers, bool) or workers < 1:
        raise ConfigError("workers must be a positive integer")
    flags = {}
    for key, default in (("homology", True), ("two_route", False), ("timings", False)):
        v = doc.get(key, default)
        if not isinstance(v, bool):
            raise ConfigError(f"{key} must be true or false")
        flags[key] = v
    output = doc.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a path string")
    return ExperimentConfig(sweeps, output=output, workers=workers, **flags)


def load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    return parse_config(doc)


# -- one cell --------------------------------------------------------------------

def _rat(x):
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _check(cond, msg, problems):
    if not cond:
        problems.append(msg)


def compute_cell(cell):
    """Build every statistic for one (family, parameter, R) cell as a dict of strings."""
    t0 = time.perf_counter()
    row = dict.fromkeys(FIELDS, "")
    row.update(family=cell.family, params=cell.label(), R=str(cell.R))
    try:
        problems = _fill_row(cell, row)
    except Exception as exc:          # recorded per row; the sweep carries on
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row, False
    if cell.timings:
        row["runtime_ms"] = str(round(1000 * (time.perf_counter() - t0)))
    if problems:
        row["error"] = "invariant: " + "; ".join(problems)
    return row, not problems


def _fill_row(cell, row):
    problems = []
    group, action = make_action(cell.family, **cell.params)
    graph = build_schreier(action)
    N, k = graph.n_vertices, graph.k
    rw = build_rewiring(graph, group, cell.R)
    labeling = label_rewiring(graph, rw, group)
    corr = correction_set(graph, labeling, group)
    bound = rank_upper_bound(rw.n_edges, N, corr)
    density = rw.density
    row.update(
        index=str(N), edges_G=str(graph.n_edges), edges_H=str(rw.n_edges),
        density=_rat(density), density_decimal=repr(float(density)),
        dL_measured="inf" if rw.distortion == UNBOUNDED else str(rw.distortion),
        dL_budget=str(rw.budget), bad_fraction=_rat(rw.bad_fraction),
        degenerate=str(rw.degenerate).lower(), correction_size=str(len(corr)),
        rank_upper=_rat(bound.upper),
    )
    _check(density <= rw.density_bound, "density above 1+(k-1)/R+2k*bad_fraction", problems)
    _check(rw.distortion <= rw.budget, "d_L above (2R+1)^k", problems)
    if cell.gamma_d is not None:
        row["gamma_d"] = _rat(gamma_sum(action, group, cell.gamma_d))
    if cell.homology:
        mat = abelianized_matrix(schreier_presentation(group, graph))
        snf = smith_normal_form(mat)
        trs = snf.trs
        lower = abelian_rank_lower_bound(snf.torsion, snf.betti)
        row.update(betti=str(snf.betti), trs=str(trs), rank_lower_ab=str(lower),
                   log_trs_over_index=repr(log_int(trs) / N))
        _check(within_hadamard(trs, mat), "trs above the Hadamard bound", problems)
        b = max(1, int(max(mat.row_abs_sums().tolist(), default=0)))
        # ln trs / N <= k ln b, compared exactly as trs <= b^(kN)
        _check(trs == 1 or (b > 1 and (trs.bit_length() <= k * N or trs <= b ** (k * N))),
               "ln trs/index above k ln b", problems)
        _check(Fraction(lower - 1, N) <= bound.upper, "abelian rank lower bound above rank_upper",
               problems)
        if cell.two_route:
            pres = rewired_complex(group, graph, rw, labeling, corr)
            other = smith_normal_form(abelianized_matrix(pres))
            agree = other.invariants() == snf.invariants()
            row["routes_agree"] = str(agree).lower()
            _check(agree, f"routes disagree: {snf.invariants()} vs {other.invariants()}", problems)
    return problems


# -- sweep -------------------------------------------------------------------------

@dataclass
class ExperimentResult:
    rows: list
    summary: dict
    ok: bool = True
    violations: list = field(default_factory=list)


def run_experiment(config, workers=None):
    cells = config.cells()
    workers = config.workers if workers is None else workers
    if workers > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(cells))) as pool:
            results = list(pool.map(compute_cell, cells))
    else:
        results = [compute_cell(c) for c in cells]
    rows = [r for r, _ in results]
    violations = [(c.family, c.label(), c.R, r["error"]) for c, (r, ok) in zip(cells, results) if not ok]
    return ExperimentResult(rows, summarize(config, rows), not violations, violations)


def summarize(config, rows):
    """Per-R limsup density, the cc estimate and the torsion-bound audit, per family."""
    out = []
    for sw in config.sweeps:
        mine = [r for r in rows if r["family"] == sw.family and not r["error"]
                and int(r["R"]) in sw.R and _in_sweep(r, sw)]
        per_r = []
        for R in sw.R:
            live = [r for r in mine if int(r["R"]) == R and r["degenerate"] == "false"]
            if not live:
                per_r.append({"R": R, "limsup_density": None, "eps": None, "d": None,
                              "eps_ln_d": None})
                continue
            sup = max(Fraction(r["density"]) for r in live)
            d = max(int(r["dL_measured"]) for r in live)
            eps = sup - 1
            per_r.append({"R": R, "limsup_density": _rat(sup), "eps": _rat(eps), "d": d,
                          "eps_ln_d": float(eps) * math.log(d)})
        known = [Fraction(e["limsup_density"]) for e in per_r if e["limsup_density"]]
        out.append({
            "family": sw.family,
            "per_R": per_r,
            "cc_estimate": _rat(min(known)) if known else None,
            "torsion_audit": [_audit(r) for r in mine if r["trs"]],
        })
    return {"sweeps": out}


def _in_sweep(row, sw):
    key = SIZE_KEY[sw.family]
    sizes = {str(s) for s in sw.sizes}
    parts = dict(p.split("=", 1) for p in row["params"].split(";"))
    return parts.get(key) in sizes


def _relator_bound(family, label):
    parts = dict(p.split("=", 1) for p in label.split(";"))
    if family == "torus":
        return torus_group(int(parts.get("k", 2))).max_relator_length
    if family == "heisenberg":
        return heisenberg_group().max_relator_length
    return sl3_group(family).max_relator_length


def _audit(row):
    """Measured ln trs / index against (eps + delta + gamma) ln(4 b d^4).

    eps + delta is read off the row's density; gamma is gamma_d when computed,
    otherwise the correction measure |I|/N it bounds.
    """
    N = int(row["index"])
    gamma = Fraction(row["gamma_d"]) if row["gamma_d"] else Fraction(int(row["correction_size"]), N)
    b = _relator_bound(row["family"], row["params"])
    d = max(1, int(row["dL_measured"]))
    coeff = Fraction(row["density"]) - 1 + gamma
    rhs = float(coeff) * math.log(4 * b * d ** 4)
    lhs = float(row["log_trs_over_index"])
    return {"params": row["params"], "R": int(row["R"]), "lhs": lhs, "rhs": rhs, "ok": lhs <= rhs}


# -- output ------------------------------------------------------------------------

def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\r\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def rows_to_json(rows):
    return json.dumps([{k: r[k] for k in FIELDS} for r in rows], indent=1) + "\n"
