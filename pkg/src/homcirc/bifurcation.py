"""Graph-theoretic certification of simple stationary bifurcation points.

The checker verifies two topological hypotheses (no homogeneous reactive
loops/cutsets; the bifurcating resistor forms a cutset with capacitors)
and three device hypotheses (characteristics through the origin, strict
local passivity away from the bifurcating branch, non-vanishing proper
tree sum), then certifies the zero-eigenvalue structure through the
characteristic polynomial with the bifurcation parameter kept symbolic:
the independent term must be an exact multiple of the parameter and the
linear term must survive at the critical value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from . import analysis as an
from . import expr as ex
from . import graph as gr
from . import poly as pl
from .analysis import OperatingPoint
from .netlist import Circuit
from .poly import MultiPoly

Number = Union[Fraction, int, float]


class BifurcationError(ValueError):
    pass


@dataclass
class Verdict:
    passed: bool
    witness: Optional[str] = None


@dataclass
class BifurcationReport:
    hypotheses: dict[str, Verdict] = field(default_factory=dict)
    # Independent term of the characteristic polynomial as k * mu.
    indep_term_k: Optional[Number] = None
    indep_term_max_residual: float = 0.0
    lambda1_at_zero: Optional[Number] = None
    condition_i: Optional[Verdict] = None
    condition_ii: Optional[Verdict] = None
    overall: str = "inconclusive"  # certified | refuted | inconclusive

    def as_dict(self) -> dict:
        return {
            "hypotheses": {k: {"passed": v.passed, "witness": v.witness}
                           for k, v in self.hypotheses.items()},
            "indep_term_k": _num(self.indep_term_k),
            "indep_term_max_residual": self.indep_term_max_residual,
            "lambda1_at_zero": _num(self.lambda1_at_zero),
            "condition_i": None if self.condition_i is None else
            {"passed": self.condition_i.passed, "witness": self.condition_i.witness},
            "condition_ii": None if self.condition_ii is None else
            {"passed": self.condition_ii.passed, "witness": self.condition_ii.witness},
            "overall": self.overall,
        }


def _num(x):
    if x is None:
        return None
    if isinstance(x, Fraction):
        return str(x)
    return float(x)


_ORIGIN_TOL = 1e-10


def _origin_bindings(c: Circuit, mu_symbol: str, mu_value: Number) -> dict:
    bindings: dict[str, Number] = dict(c.param_values())
    bindings[mu_symbol] = mu_value
    bindings.update({"i": Fraction(0), "v": Fraction(0)})
    return bindings


def _check_normal_form(c: Circuit, bif: str, mu_symbol: str) -> None:
    """The bifurcating characteristic must behave like f = i - g(v, mu)
    with g(0, mu) = 0, dg/dv(0,0) = 0 and d2g/dvdmu(0,0) = 1."""
    branch = c.branch(bif)
    if branch.kind != "resistor":
        raise BifurcationError(f"branch {bif!r} is a {branch.kind}, not a resistor")
    f = branch.characteristic
    if f is None:
        raise BifurcationError(f"branch {bif!r} has no characteristic")
    if mu_symbol not in ex.free_names(f):
        raise BifurcationError(
            f"characteristic of {bif!r} does not reference parameter {mu_symbol!r}")
    deviations = []
    for mu in (Fraction(-1), Fraction(-1, 10), Fraction(0), Fraction(1, 10), Fraction(1)):
        val = ex.evaluate(f, _origin_bindings(c, mu_symbol, mu))
        if abs(val) > _ORIGIN_TOL:
            deviations.append(f"f(0,0) = {float(val):.3e} at {mu_symbol}={mu}")
    f_i = ex.evaluate(ex.diff(f, "i"), _origin_bindings(c, mu_symbol, Fraction(0)))
    if abs(f_i - 1) > _ORIGIN_TOL:
        deviations.append(f"df/di(0,0,0) = {float(f_i):.6g}, expected 1")
    f_v = ex.evaluate(ex.diff(f, "v"), _origin_bindings(c, mu_symbol, Fraction(0)))
    if abs(f_v) > _ORIGIN_TOL:
        deviations.append(f"df/dv(0,0,0) = {float(f_v):.6g}, expected 0")
    f_vmu = ex.evaluate(ex.diff(ex.diff(f, "v"), mu_symbol),
                        _origin_bindings(c, mu_symbol, Fraction(0)))
    if abs(f_vmu + 1) > 1e-8:
        deviations.append(f"d2f/dvdmu(0,0,0) = {float(f_vmu):.6g}, expected -1")
    if deviations:
        raise BifurcationError(
            "bifurcating characteristic is not in the form i - (mu*v + o(v)): "
            + "; ".join(deviations))


def _mu_linear_pair(c: Circuit, bif: str, mu_symbol: str
                    ) -> tuple[MultiPoly, Number, float]:
    """P of the bifurcating branch as an exact linear polynomial in mu,
    plus Q (required mu-independent) and the max linearity residual."""
    f = c.branch(bif).characteristic
    fv = ex.diff(f, "v")
    fi = ex.diff(f, "i")

    def fv_at(mu: Number) -> Number:
        return ex.evaluate(fv, _origin_bindings(c, mu_symbol, mu))

    b0 = fv_at(Fraction(0))
    a = fv_at(Fraction(1)) - b0
    residual = 0.0
    for mu in (Fraction(-1), Fraction(2)):
        residual = max(residual, abs(float(fv_at(mu) - (b0 + a * mu))))
    if residual > 1e-10:
        raise BifurcationError(
            f"dP/dmu of branch {bif!r} is not linear in {mu_symbol!r} "
            f"at the origin (residual {residual:.3e})")
    mu_sym = pl.param(mu_symbol)
    p_poly = MultiPoly.constant(b0) + MultiPoly.symbol(mu_sym) * a
    q0 = -ex.evaluate(fi, _origin_bindings(c, mu_symbol, Fraction(0)))
    for mu in (Fraction(-1), Fraction(1)):
        qv = -ex.evaluate(fi, _origin_bindings(c, mu_symbol, mu))
        residual = max(residual, abs(float(qv - q0)))
    if residual > 1e-10:
        raise BifurcationError(
            f"Q of branch {bif!r} depends on {mu_symbol!r} at the origin")
    return p_poly, q0, residual


def _proper_trees(c: Circuit, include_kind: str, exclude_kind: str) -> list[tuple[int, ...]]:
    must = {k for k, b in enumerate(c.branches) if b.kind == include_kind}
    forbid = {k for k, b in enumerate(c.branches) if b.kind == exclude_kind}
    return [t for t in gr.spanning_trees(c)
            if must <= set(t) and not (forbid & set(t))]


def check_bifurcation(c: Circuit, bif_branch: str,
                      mu_symbol: str = "mu") -> BifurcationReport:
    """Certification of a simple stationary bifurcation point
    at the origin with the incremental conductance of `bif_branch` as the
    parameter.  A failed hypothesis refutes with a witness; certification
    is sufficient, not necessary."""
    _check_normal_form(c, bif_branch, mu_symbol)
    if any(b.kind == "memristor" for b in c.branches):
        raise BifurcationError("memristive circuits are outside the scope "
                               "of the stationary bifurcation test")
    report = BifurcationReport()
    origin = OperatingPoint()
    params0 = {mu_symbol: Fraction(0)}

    # T1: no loops or cutsets formed by one reactive kind alone.
    t1_witness = None
    for kind in ("capacitor", "inductor"):
        if gr.has_homogeneous_loop(c, kind):
            t1_witness = f"loop of {kind}s"
            break
        if gr.has_homogeneous_cutset(c, kind):
            t1_witness = f"cutset of {kind}s"
            break
    report.hypotheses["T1"] = Verdict(t1_witness is None, t1_witness)

    # T2: the bifurcating resistor forms a cutset with capacitors.
    t2 = gr.is_bridge_after_deleting(c, bif_branch, "capacitor")
    report.hypotheses["T2"] = Verdict(
        t2, None if t2 else
        f"{bif_branch} is not a cut edge once capacitors are removed")

    # D1: every resistor characteristic passes through the origin
    # (sources with nonzero dc fail here).
    d1_witness = None
    from .netlist import sources_as_submersions
    resistive = sources_as_submersions(c)
    for b in resistive.branches:
        if b.kind != "resistor":
            continue
        f = b.characteristic
        if f is None:
            d1_witness = f"{b.name} has no characteristic"
            break
        bindings = dict(c.param_values())
        bindings.update(params0)
        bindings.update({"i": Fraction(0), "v": Fraction(0)})
        val = ex.evaluate(f, bindings)
        if abs(val) > _ORIGIN_TOL:
            d1_witness = f"{b.name}: f(0,0) = {float(val):.3e}"
            break
    report.hypotheses["D1"] = Verdict(d1_witness is None, d1_witness)

    # D2: strict local passivity of everything but the bifurcating branch,
    # plus positive capacitances and inductances at the origin.
    d2_witness = None
    from . import projective as pj
    for b in resistive.branches:
        if b.name == bif_branch:
            continue
        if b.kind == "resistor":
            bindings = dict(c.param_values())
            bindings.update(params0)
            if not pj.is_strictly_locally_passive(
                    b.characteristic, (Fraction(0), Fraction(0)), bindings):
                d2_witness = f"{b.name} is not strictly locally passive at the origin"
                break
        elif b.kind in ("capacitor", "inductor"):
            try:
                val = an.reactance_value(c, c.branch(b.name), origin, params0)
            except an.AnalysisError as err:
                d2_witness = f"{b.name}: {err}"
                break
            if not val > 0:
                d2_witness = f"{b.name}: reactance {float(val):.6g} not positive"
                break
    report.hypotheses["D2"] = Verdict(d2_witness is None, d2_witness)

    # Per-branch (P, Q) at the origin; bifurcating P carries mu symbolically.
    p_mu, q_bif, residual = _mu_linear_pair(c, bif_branch, mu_symbol)
    report.indep_term_max_residual = residual
    pairs: dict[str, tuple[Number, Number]] = {}
    for b in resistive.branches:
        if b.kind != "resistor" or b.name == bif_branch:
            continue
        bindings = dict(c.param_values())
        bindings.update(params0)
        bindings.update({"i": Fraction(0), "v": Fraction(0)})
        pairs[b.name] = (ex.evaluate(ex.diff(b.characteristic, "v"), bindings),
                         -ex.evaluate(ex.diff(b.characteristic, "i"), bindings))

    # D3: proper-tree sum (all capacitors in, all inductors out) of
    # twig df/dv and chord df/di factors at the origin, mu = 0.
    d3_sum: Number = Fraction(0)
    for tree in _proper_trees(resistive, "capacitor", "inductor"):
        twigs = set(tree)
        prod: Number = Fraction(1)
        for k, b in enumerate(resistive.branches):
            if b.kind != "resistor":
                continue
            if b.name == bif_branch:
                pv = ex.evaluate(ex.diff(b.characteristic, "v"),
                                 _origin_bindings(c, mu_symbol, Fraction(0)))
                qv = ex.evaluate(ex.diff(b.characteristic, "i"),
                                 _origin_bindings(c, mu_symbol, Fraction(0)))
            else:
                pv, qv = pairs[b.name][0], -pairs[b.name][1]
            prod = prod * (pv if k in twigs else qv)
        d3_sum = d3_sum + prod
    d3_ok = abs(d3_sum) > _ORIGIN_TOL
    report.hypotheses["D3"] = Verdict(
        d3_ok, None if d3_ok else f"proper tree sum = {float(d3_sum):.3e}")

    # Characteristic polynomial with mu kept symbolic in the bifurcating P.
    symbolic = an.char_poly(c, mode="symbolic").poly
    substitution: dict[pl.PolySymbol, MultiPoly | Number] = {
        pl.P(bif_branch): p_mu,
        pl.Q(bif_branch): q_bif,
    }
    for name, (pv, qv) in pairs.items():
        substitution[pl.P(name)] = pv
        substitution[pl.Q(name)] = qv
    for b in c.branches:
        if b.kind == "capacitor":
            substitution[pl.cap(b.name)] = an.reactance_value(c, b, origin, params0)
        elif b.kind == "inductor":
            substitution[pl.ind(b.name)] = an.reactance_value(c, b, origin, params0)
    reduced = pl.substitute(symbolic, substitution)
    lam_coeffs = pl.lambda_coefficients(reduced)

    # Condition (i): independent term is exactly k*mu with k nonzero, and
    # the lambda coefficient survives at mu = 0.
    mu_sym = pl.param(mu_symbol)
    indep = lam_coeffs[0]
    monos = list(indep.terms.items())
    is_k_mu = (len(monos) == 1 and monos[0][0] == ((mu_sym, 1),)
               and abs(monos[0][1]) > _ORIGIN_TOL)
    if is_k_mu:
        report.indep_term_k = monos[0][1]
    lam1 = (pl.eval_poly(lam_coeffs[1], {mu_sym: Fraction(0)})
            if len(lam_coeffs) > 1 else Fraction(0))
    report.lambda1_at_zero = lam1
    cond_i = is_k_mu and abs(lam1) > _ORIGIN_TOL
    report.condition_i = Verdict(cond_i, None if cond_i else (
        f"independent term {pl.to_text(indep)} is not a single mu-monomial"
        if not is_k_mu else f"lambda coefficient at mu=0 is {float(lam1):.3e}"))

    # Condition (ii): the same k*mu structure certifies the transversality
    # derivative; cross-check that every all-inductor/no-capacitor tree
    # contains the bifurcating branch.
    bif_idx = c.branch_index(bif_branch)
    witness_tree = None
    star_trees = _proper_trees(c, "inductor", "capacitor")
    for tree in star_trees:
        if bif_idx not in tree:
            witness_tree = "{" + ", ".join(c.branches[k].name for k in tree) + "}"
            break
    cond_ii = is_k_mu and witness_tree is None and bool(star_trees)
    if cond_ii:
        ii_witness = None
    elif witness_tree is not None:
        ii_witness = f"tree {witness_tree} omits {bif_branch}"
    elif not star_trees:
        ii_witness = "no spanning tree with all inductors and no capacitors"
    else:
        ii_witness = "independent term is not a single mu-monomial"
    report.condition_ii = Verdict(cond_ii, ii_witness)

    hypotheses_ok = all(v.passed for v in report.hypotheses.values())
    if not hypotheses_ok:
        report.overall = "refuted"
    elif cond_i and cond_ii:
        report.overall = "certified"
    else:
        report.overall = "inconclusive"
    return report


# ---------------------------------------------------------------------------
# Empirical stability-exchange probe


@dataclass
class ProbeRow:
    mu: Number
    branch_label: str
    bif_voltage: float
    near_zero_root: Optional[float]
    root_sign: Optional[int]
    zero_root_exact: bool
    coefficients: list[Number]


def eigen_exchange_probe(c: Circuit, bif_branch: str,
                         mu_values: Sequence[Number],
                         mu_symbol: str = "mu") -> list[ProbeRow]:
    """For each mu and each equilibrium branch reachable from seeded
    guesses, the numeric characteristic polynomial and the sign of its
    real root nearest zero (companion-matrix roots)."""
    rows: list[ProbeRow] = []
    for mu in mu_values:
        bound = _bind_param(c, mu_symbol, mu)
        seeds = [OperatingPoint(),
                 OperatingPoint.from_dict({bif_branch: {"v": -mu}})]
        seen: list[float] = []
        for label, seed in zip(("v1=0", "v1=-mu"), seeds):
            op = an.solve_equilibrium(bound, seed)
            v_bif = float(op.get(bif_branch, "v"))
            if any(abs(v_bif - s) < 1e-9 for s in seen) and label != "v1=0":
                continue
            seen.append(v_bif)
            result = an.char_poly(bound, op, mode="numeric")
            coeffs = result.coefficients
            zero_exact = coeffs[0] == 0
            root, sign = _near_zero_real_root(coeffs)
            rows.append(ProbeRow(mu=mu, branch_label=label, bif_voltage=v_bif,
                                 near_zero_root=root, root_sign=sign,
                                 zero_root_exact=zero_exact,
                                 coefficients=list(coeffs)))
    return rows


def _bind_param(c: Circuit, name: str, value: Number) -> Circuit:
    params = [(n, value if n == name else v) for n, v in c.params]
    if name not in {n for n, _ in c.params}:
        params.append((name, value))
    return Circuit(c.nodes, c.branches, tuple(params))


def _near_zero_real_root(coeffs: Sequence[Number]) -> tuple[Optional[float], Optional[int]]:
    arr = [float(x) for x in coeffs]
    while arr and arr[-1] == 0:
        arr.pop()
    if len(arr) < 2:
        return None, None
    roots = np.roots(list(reversed(arr)))
    real = [r.real for r in roots if abs(r.imag) <= 1e-9 * (1 + abs(r))]
    if not real:
        return None, None
    nearest = min(real, key=abs)
    sign = 0 if nearest == 0 else (1 if nearest > 0 else -1)
    return nearest, sign
