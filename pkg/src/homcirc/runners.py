"""Command orchestration shared by the CLI and the HTTP service.

Every runner takes plain text/primitive inputs, returns a JSON-ready
dict plus a verdict code: 0 success/certified, 1 analysis says no
(degenerate, refuted, non-associate), 2 bad input or precondition.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from . import analysis as an
from . import bifurcation as bi
from . import expr as ex
from . import graph as gr
from . import netlist as nl
from . import poly as pl
from . import projective as pj

OK, REFUTED, BAD_INPUT = 0, 1, 2


class RunnerError(ValueError):
    def __init__(self, message: str, code: int = BAD_INPUT):
        super().__init__(message)
        self.code = code


def _num(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    return float(x)


def _poly_doc(p: pl.MultiPoly) -> dict:
    terms = []
    for mono in sorted(p.terms, key=pl._mono_key):
        terms.append({
            "exponents": {f"{s.role}:{s.name}" if s.name else s.role: e
                          for s, e in mono},
            "coeff": _num(p.terms[mono]),
        })
    return {"text": pl.to_text(p), "terms": terms}


def _load_circuit(netlist_text: str) -> nl.Circuit:
    try:
        return nl.parse_netlist(netlist_text)
    except (nl.NetlistError, ex.ExprError) as err:
        raise RunnerError(f"netlist error: {err}") from err


def _load_op(op_text: Optional[str]) -> an.OperatingPoint:
    if op_text is None:
        raise RunnerError("an operating-point file is required (--at)")
    try:
        return an.parse_operating_point(op_text)
    except (an.AnalysisError, ValueError) as err:
        raise RunnerError(f"operating point error: {err}") from err


def run_parse(netlist_text: str) -> tuple[int, dict]:
    c = _load_circuit(netlist_text)
    return OK, {
        "nodes": list(c.nodes),
        "branches": [{
            "name": b.name, "tail": b.tail, "head": b.head, "kind": b.kind,
            "expression": next((ex.to_text(e) for e in
                                (b.characteristic, b.reactance, b.value)
                                if e is not None), None),
        } for b in c.branches],
        "params": {name: (None if val is None else _num(val))
                   for name, val in c.params},
    }


def run_trees(netlist_text: str) -> tuple[int, dict]:
    c = _load_circuit(netlist_text)
    trees = gr.spanning_trees(c)
    return OK, {
        "count": len(trees),
        "trees": [[c.branches[k].name for k in t] for t in trees],
    }


def run_kirchhoff(netlist_text: str) -> tuple[int, dict]:
    c = _load_circuit(netlist_text)
    return OK, {"kirchhoff_polynomial": _poly_doc(an.kirchhoff_poly(c))}


def _parse_dehom_map(text: str) -> dict[str, str]:
    choices = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        if "=" not in item:
            raise RunnerError(f"bad dehomogenization entry {item!r}; "
                              "expected branch=current|voltage")
        branch, control = item.split("=", 1)
        if control not in ("current", "voltage"):
            raise RunnerError(f"unknown control {control!r} for branch {branch!r}")
        choices[branch] = control
    return choices


def run_charpoly(netlist_text: str, symbolic: bool = True,
                 op_text: Optional[str] = None,
                 dehom: Optional[str] = None,
                 tol: float = an.RESIDUAL_TOL) -> tuple[int, dict]:
    c = _load_circuit(netlist_text)
    has_memristor = any(b.kind == "memristor" for b in c.branches)
    compute = an.char_poly_memristive if has_memristor else an.char_poly
    try:
        if symbolic:
            result = compute(c, mode="symbolic")
        else:
            result = compute(c, _load_op(op_text), mode="numeric", tol=tol)
    except (an.AnalysisError, ex.ExprError, pj.DegenerateDifferentialError) as err:
        raise RunnerError(f"analysis error: {err}") from err
    doc: dict = {
        "mode": result.mode,
        "memristor_count": result.memristor_count,
        "scale_disclaimer": "defined up to a non-vanishing scalar factor",
    }
    if result.mode == "symbolic":
        poly = result.poly
        if dehom:
            choices = _parse_dehom_map(dehom)
            try:
                poly = pl.dehomogenize(poly, choices,
                                       frozenset(result.memristor_branches))
            except pl.PolyError as err:
                raise RunnerError(f"dehomogenization error: {err}") from err
        doc["polynomial"] = _poly_doc(poly)
    else:
        doc["coefficients"] = [_num(x) for x in result.coefficients]
        try:
            oracle = an.pencil_oracle(c, _load_op(op_text), tol=tol)
            doc["pencil_oracle"] = [_num(x) for x in oracle]
            doc["oracle_ratio"] = _proportionality(result.coefficients, oracle)
        except an.AnalysisError as err:
            doc["pencil_oracle_error"] = str(err)
    return OK, doc


def _proportionality(a, b) -> Optional[float]:
    pivot = max(range(len(a)), key=lambda k: abs(float(a[k])), default=None)
    if pivot is None or len(a) != len(b) or float(a[pivot]) == 0:
        return None
    if float(b[pivot]) == 0:
        return None
    return float(b[pivot]) / float(a[pivot])


def run_check_solution(netlist_text: str, op_text: str,
                       tol: float = an.RESIDUAL_TOL) -> tuple[int, dict]:
    c = _load_circuit(netlist_text)
    op = _load_op(op_text)
    try:
        residuals = an.check_solution(c, op, tol)
    except ex.ExprError as err:
        raise RunnerError(f"evaluation error: {err}") from err
    doc = {"residuals": {
        "kcl": residuals["kcl"], "kvl": residuals["kvl"],
        "device": residuals["device"], "max": residuals["max"],
        "tol": residuals["tol"],
    }}
    if not residuals["ok"]:
        raise RunnerError(
            f"operating point residual {residuals['max']:.3e} exceeds "
            f"tolerance {tol:.1e}")
    try:
        total = an.nondegeneracy_sum(c, op, tol)
        oracle = an.det_oracle_matrix0(c, op, tol)
    except an.AnalysisError as err:
        raise RunnerError(f"analysis error: {err}") from err
    m = len(c.branches)
    n = c.node_count
    sign = -1 if (m - n + 1) % 2 else 1
    doc.update({
        "nondegeneracy_sum": _num(total),
        "matrix0_determinant": _num(oracle),
        "sign_factor": sign,
        "nondegenerate": bool(abs(total) > 1e-12),
    })
    code = OK if doc["nondegenerate"] else REFUTED
    return code, doc


def run_check_bifurcation(netlist_text: str, branch: str,
                          mu: str = "mu") -> tuple[int, dict]:
    c = _load_circuit(netlist_text)
    try:
        report = bi.check_bifurcation(c, branch, mu)
    except (bi.BifurcationError, nl.NetlistError, an.AnalysisError) as err:
        raise RunnerError(f"bifurcation check error: {err}") from err
    doc = report.as_dict()
    code = OK if report.overall == "certified" else REFUTED
    return code, doc


def run_associates(f1_text: str, f2_text: str,
                   domain: tuple[float, float, float, float],
                   grid: int = 32, tol: float = 1e-8) -> tuple[int, dict]:
    try:
        f1 = ex.parse_expr(f1_text)
        f2 = ex.parse_expr(f2_text)
    except ex.ExprError as err:
        raise RunnerError(f"expression error: {err}") from err
    try:
        report = pj.check_associates(f1, f2, domain, grid, tol)
    except pj.DegenerateDifferentialError as err:
        raise RunnerError(f"degenerate differential: {err}") from err
    except ValueError as err:
        raise RunnerError(str(err)) from err
    doc = {
        "associates": report.associates,
        "gamma_min_abs": report.gamma_min_abs,
        "gamma_max_abs": report.gamma_max_abs,
        "zero_set_mismatches": report.zero_set_mismatches,
        "samples": report.samples,
        "gamma_threshold": report.gamma_threshold,
        "zero_eps_policy": report.zero_eps_policy,
    }
    return (OK if report.associates else REFUTED), doc
