"""Tree-sum polynomials and their determinant oracles.

The Kirchhoff polynomial, resistive nondegeneracy sum and characteristic
polynomial at equilibrium are all spanning-tree sums with projective
per-branch weights; each one is paired with an independent determinant
computed from the fundamental cut/cycle matrices of the reference tree
(so the matrix-tree normalization constant is exactly 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional, Sequence, Union

import numpy as np

from . import expr as ex
from . import graph as gr
from . import poly as pl
from .expr import Expression
from .netlist import Branch, Circuit, sources_as_submersions
from .poly import MultiPoly

Number = Union[Fraction, int, float]

RESIDUAL_TOL = 1e-8


class AnalysisError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Operating points


@dataclass(frozen=True)
class OperatingPoint:
    """Per-branch variable values; missing currents/voltages default to 0,
    which matches the equilibrium conditions i_c = 0, v_l = 0, i_m = v_m = 0."""

    values: tuple[tuple[str, tuple[tuple[str, Number], ...]], ...] = ()

    @staticmethod
    def from_dict(data: Mapping[str, Mapping[str, Number]]) -> "OperatingPoint":
        return OperatingPoint(tuple(
            (name, tuple(sorted(vals.items()))) for name, vals in data.items()))

    def as_dict(self) -> dict[str, dict[str, Number]]:
        return {name: dict(vals) for name, vals in self.values}

    def get(self, branch: str, var: str, default: Number = Fraction(0)) -> Number:
        for name, vals in self.values:
            if name == branch:
                for key, val in vals:
                    if key == var:
                        return val
        return default


def parse_operating_point(text: str) -> OperatingPoint:
    """One line per branch: ``name i=<num> v=<num>`` or ``name sigma= phi=``."""
    data: dict[str, dict[str, Number]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        name = tokens[0]
        vals: dict[str, Number] = {}
        for tok in tokens[1:]:
            if "=" not in tok:
                raise AnalysisError(f"op line {lineno}: bad token {tok!r}")
            key, sval = tok.split("=", 1)
            if key not in ("i", "v", "sigma", "phi"):
                raise AnalysisError(f"op line {lineno}: unknown variable {key!r}")
            vals[key] = Fraction(sval)
        data[name] = vals
    return OperatingPoint.from_dict(data)


def _branch_bindings(c: Circuit, b: Branch, op: OperatingPoint,
                     extra_params: Mapping[str, Number] | None = None) -> dict:
    bindings: dict[str, Number] = dict(c.param_values())
    if extra_params:
        bindings.update(extra_params)
    if b.kind == "memristor":
        bindings["sigma"] = op.get(b.name, "sigma")
        bindings["phi"] = op.get(b.name, "phi")
    else:
        bindings["i"] = op.get(b.name, "i")
        bindings["v"] = op.get(b.name, "v")
    return bindings


def _require_characteristic(b: Branch) -> Expression:
    f = b.characteristic
    if f is None:
        raise AnalysisError(
            f"branch {b.name!r} has no characteristic; numeric analysis "
            "needs an explicit expression")
    return f


def _partial(f: Expression, name: str, bindings: Mapping[str, Number]) -> Number:
    return ex.evaluate(ex.diff(f, name), bindings)


def reactance_value(c: Circuit, b: Branch, op: OperatingPoint,
                    extra_params: Mapping[str, Number] | None = None) -> Number:
    if b.reactance is None:
        raise AnalysisError(f"branch {b.name!r} has no reactance expression")
    bindings: dict[str, Number] = dict(c.param_values())
    if extra_params:
        bindings.update(extra_params)
    if b.kind == "capacitor":
        bindings["v"] = op.get(b.name, "v")
    else:
        bindings["i"] = op.get(b.name, "i")
    return ex.evaluate(b.reactance, bindings)


def device_pair(c: Circuit, b: Branch, op: OperatingPoint,
                extra_params: Mapping[str, Number] | None = None
                ) -> tuple[Number, Number]:
    """(P, Q) for a resistor-like or memristive branch at the point."""
    f = _require_characteristic(b)
    bindings = _branch_bindings(c, b, op, extra_params)
    if b.kind == "memristor":
        return (_partial(f, "phi", bindings), -_partial(f, "sigma", bindings))
    return (_partial(f, "v", bindings), -_partial(f, "i", bindings))


# ---------------------------------------------------------------------------
# Residual checks


def kirchhoff_residuals(c: Circuit, op: OperatingPoint) -> tuple[float, float]:
    fm = gr.fundamental_matrices(c, gr.reference_tree(c))
    currents = [op.get(b.name, "i") for b in c.branches]
    voltages = [op.get(b.name, "v") for b in c.branches]
    kcl = max((abs(sum(a * x for a, x in zip(row, currents))) for row in fm.A),
              default=0)
    kvl = max((abs(sum(b * x for b, x in zip(row, voltages))) for row in fm.B),
              default=0)
    return float(kcl), float(kvl)


def check_solution(c: Circuit, op: OperatingPoint, tol: float = RESIDUAL_TOL,
                   equilibrium: bool = False) -> dict:
    """Residual report for an operating point; raises nothing, reports all."""
    work = sources_as_submersions(c)
    device_residuals = {}
    for b in work.branches:
        if b.kind in ("resistor", "memristor") and b.characteristic is not None:
            bindings = _branch_bindings(work, b, op)
            device_residuals[b.name] = abs(float(
                ex.evaluate(b.characteristic, bindings)))
    kcl, kvl = kirchhoff_residuals(c, op)
    worst = max([kcl, kvl] + list(device_residuals.values()), default=0.0)
    equilibrium_residual = 0.0
    if equilibrium:
        for b in c.branches:
            if b.kind == "capacitor":
                equilibrium_residual = max(equilibrium_residual,
                                           abs(float(op.get(b.name, "i"))))
            elif b.kind == "inductor":
                equilibrium_residual = max(equilibrium_residual,
                                           abs(float(op.get(b.name, "v"))))
            elif b.kind == "memristor":
                equilibrium_residual = max(equilibrium_residual,
                                           abs(float(op.get(b.name, "i"))),
                                           abs(float(op.get(b.name, "v"))))
        worst = max(worst, equilibrium_residual)
    return {
        "kcl": kcl,
        "kvl": kvl,
        "device": device_residuals,
        "equilibrium": equilibrium_residual,
        "max": worst,
        "ok": worst <= tol,
        "tol": tol,
    }


def _require_solution(c: Circuit, op: OperatingPoint, tol: float,
                      equilibrium: bool) -> None:
    report = check_solution(c, op, tol, equilibrium)
    if not report["ok"]:
        raise AnalysisError(
            f"operating point fails residual check (max {report['max']:.3e} "
            f"> tol {tol:.1e})")


# ---------------------------------------------------------------------------
# Exact / floating determinants


def determinant(matrix: Sequence[Sequence[Number]]) -> Number:
    """Determinant; exact fraction elimination for rational entries,
    numpy LU otherwise."""
    n = len(matrix)
    if n == 0:
        return Fraction(1)
    exact = all(isinstance(x, (int, Fraction)) for row in matrix for x in row)
    if not exact:
        return float(np.linalg.det(np.array(matrix, dtype=float)))
    work = [[Fraction(x) for x in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        pivot_row = next((r for r in range(col, n) if work[r][col] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != col:
            work[col], work[pivot_row] = work[pivot_row], work[col]
            det = -det
        pivot = work[col][col]
        det *= pivot
        for r in range(col + 1, n):
            factor = work[r][col] / pivot
            if factor:
                work[r] = [a - factor * b for a, b in zip(work[r], work[col])]
    return det


# ---------------------------------------------------------------------------
# Kirchhoff polynomial (projectively weighted matrix-tree theorem)


def kirchhoff_poly(c: Circuit) -> MultiPoly:
    """Sum over spanning trees of prod twig P_j * prod chord Q_k."""
    out = MultiPoly.zero()
    for tree in gr.spanning_trees(c):
        twigs = set(tree)
        factors = [(pl.P(b.name) if k in twigs else pl.Q(b.name), 1)
                   for k, b in enumerate(c.branches)]
        out = out + MultiPoly.monomial(factors)
    return out


def _twig_first_order(c: Circuit) -> tuple[tuple[int, ...], list[int]]:
    """Reference tree plus the branch permutation putting twigs first,
    which makes the fundamental blocks literally (I K) and (-K^T I)."""
    tree = gr.reference_tree(c)
    twigs = set(tree)
    order = list(tree) + [k for k in range(len(c.branches)) if k not in twigs]
    return tree, order


def det_oracle_kirchhoff(c: Circuit, p: Sequence[Number],
                         q: Sequence[Number]) -> Number:
    """det(A diag(p); B diag(q)) for the reference-tree fundamental matrices."""
    tree, order = _twig_first_order(c)
    fm = gr.fundamental_matrices(c, tree)
    rows: list[list[Number]] = []
    for row in fm.A:
        rows.append([row[j] * p[j] for j in order])
    for row in fm.B:
        rows.append([row[j] * q[j] for j in order])
    return determinant(rows)


# ---------------------------------------------------------------------------
# Resistive nondegeneracy (tree sum and matrix oracle)


def _resistive_view(c: Circuit) -> Circuit:
    work = sources_as_submersions(c)
    for b in work.branches:
        if b.kind != "resistor":
            raise AnalysisError(
                f"branch {b.name!r} is a {b.kind}; resistive analysis only")
    return work


def nondegeneracy_sum(c: Circuit, op: OperatingPoint,
                      tol: float = RESIDUAL_TOL) -> Number:
    """Sum over trees of prod twig df/dv * prod chord df/di at the point."""
    work = _resistive_view(c)
    _require_solution(c, op, tol, equilibrium=False)
    total: Number = Fraction(0)
    derivs = []
    for b in work.branches:
        f = _require_characteristic(b)
        bindings = _branch_bindings(work, b, op)
        derivs.append((_partial(f, "v", bindings), _partial(f, "i", bindings)))
    for tree in gr.spanning_trees(work):
        twigs = set(tree)
        prod: Number = Fraction(1)
        for k in range(len(work.branches)):
            prod = prod * (derivs[k][0] if k in twigs else derivs[k][1])
        total = total + prod
    return total


def det_oracle_matrix0(c: Circuit, op: OperatingPoint,
                       tol: float = RESIDUAL_TOL) -> Number:
    """Determinant of the stacked (A 0; 0 B; df/di df/dv) matrix."""
    work = _resistive_view(c)
    _require_solution(c, op, tol, equilibrium=False)
    tree, order = _twig_first_order(work)
    fm = gr.fundamental_matrices(work, tree)
    m = len(work.branches)
    rows: list[list[Number]] = []
    for row in fm.A:
        rows.append([row[j] for j in order] + [0] * m)
    for row in fm.B:
        rows.append([0] * m + [row[j] for j in order])
    for pos, k in enumerate(order):
        b = work.branches[k]
        f = _require_characteristic(b)
        bindings = _branch_bindings(work, b, op)
        row: list[Number] = [0] * (2 * m)
        row[pos] = _partial(f, "i", bindings)
        row[m + pos] = _partial(f, "v", bindings)
        rows.append(row)
    return determinant(rows)


# ---------------------------------------------------------------------------
# Characteristic polynomial at equilibrium


@dataclass
class CharPolyResult:
    mode: str  # symbolic | numeric
    poly: Optional[MultiPoly] = None
    coefficients: Optional[list[Number]] = None
    memristor_count: int = 0
    # The result is defined up to a single non-vanishing scalar factor.
    scale_disclaimer: bool = True
    memristor_branches: tuple[str, ...] = ()

    def lambda_coefficients(self) -> list[MultiPoly]:
        if self.poly is None:
            raise AnalysisError("symbolic coefficients need symbolic mode")
        return pl.lambda_coefficients(self.poly)


def _source_pair_symbolic(b: Branch) -> tuple[Number, Number]:
    # Normalized projective patterns (1:0) / (0:1).
    return (Fraction(1), Fraction(0)) if b.kind == "vsource" else (Fraction(0), Fraction(1))


def _tree_char_poly_symbolic(c: Circuit) -> MultiPoly:
    out = MultiPoly.zero()
    for tree in gr.spanning_trees(c):
        twigs = set(tree)
        factors: list[tuple[pl.PolySymbol, int]] = []
        coeff: Number = Fraction(1)
        lam = 0
        skip = False
        for k, b in enumerate(c.branches):
            twig = k in twigs
            if b.kind in ("resistor", "memristor"):
                factors.append((pl.P(b.name) if twig else pl.Q(b.name), 1))
            elif b.kind in ("vsource", "isource"):
                pval, qval = _source_pair_symbolic(b)
                coeff = coeff * (pval if twig else qval)
                if coeff == 0:
                    skip = True
                    break
            elif b.kind == "capacitor":
                if twig:
                    factors.append((pl.cap(b.name), 1))
                    lam += 1
            else:  # inductor
                if not twig:
                    factors.append((pl.ind(b.name), 1))
                    lam += 1
        if skip:
            continue
        if lam:
            factors.append((pl.LAMBDA, lam))
        out = out + MultiPoly.monomial(factors, coeff)
    return out


def _char_poly_impl(c: Circuit, op: Optional[OperatingPoint], mode: str,
                    allow_memristors: bool, tol: float) -> CharPolyResult:
    mem_branches = tuple(b.name for b in c.branches if b.kind == "memristor")
    if mem_branches and not allow_memristors:
        raise AnalysisError(
            f"memristor branch {mem_branches[0]!r} present; use the "
            "memristive characteristic polynomial")
    m_w = len(mem_branches)
    work = sources_as_submersions(c) if mode == "numeric" else c

    if mode == "symbolic":
        poly = _tree_char_poly_symbolic(c)
        if m_w:
            poly = poly * MultiPoly.symbol(pl.LAMBDA, m_w)
        return CharPolyResult(mode="symbolic", poly=poly, memristor_count=m_w,
                              memristor_branches=mem_branches)

    if op is None:
        raise AnalysisError("numeric mode requires an operating point")
    _require_solution(c, op, tol, equilibrium=True)

    weights = []  # per branch: (twig factor coeffs, chord factor coeffs, lam twig, lam chord)
    for b in work.branches:
        if b.kind == "resistor":
            pval, qval = device_pair(work, b, op)
            weights.append((pval, qval, 0, 0))
        elif b.kind == "memristor":
            pval, qval = device_pair(work, b, op)
            weights.append((pval, qval, 0, 0))
        elif b.kind == "capacitor":
            weights.append((reactance_value(work, b, op), Fraction(1), 1, 0))
        else:  # inductor
            weights.append((Fraction(1), reactance_value(work, b, op), 0, 1))

    degree_cap = sum(1 for b in work.branches if b.kind in ("capacitor", "inductor"))
    coeffs: list[Number] = [Fraction(0)] * (degree_cap + 1)
    for tree in gr.spanning_trees(work):
        twigs = set(tree)
        prod: Number = Fraction(1)
        lam = 0
        for k in range(len(work.branches)):
            pfac, qfac, lam_twig, lam_chord = weights[k]
            if k in twigs:
                prod = prod * pfac
                lam += lam_twig
            else:
                prod = prod * qfac
                lam += lam_chord
        coeffs[lam] = coeffs[lam] + prod
    coeffs = [Fraction(0)] * m_w + coeffs
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return CharPolyResult(mode="numeric", coefficients=coeffs,
                          memristor_count=m_w, memristor_branches=mem_branches)


def char_poly(c: Circuit, op: Optional[OperatingPoint] = None,
              mode: str = "symbolic", tol: float = RESIDUAL_TOL) -> CharPolyResult:
    """Characteristic polynomial of an RLC circuit at equilibrium (tree sum)."""
    return _char_poly_impl(c, op, mode, allow_memristors=False, tol=tol)


def char_poly_memristive(c: Circuit, op: Optional[OperatingPoint] = None,
                         mode: str = "symbolic",
                         tol: float = RESIDUAL_TOL) -> CharPolyResult:
    """As char_poly with memristors treated like resistors in the tree sum,
    then multiplied by lambda^(number of memristors)."""
    return _char_poly_impl(c, op, mode, allow_memristors=True, tol=tol)


# ---------------------------------------------------------------------------
# Matrix pencil oracle


def _pencil_matrix(c: Circuit, op: OperatingPoint, lam: Number) -> list[list[Number]]:
    work = sources_as_submersions(c)
    fm = gr.fundamental_matrices(work, gr.reference_tree(work))
    m = len(work.branches)
    rows: list[list[Number]] = []
    for row in fm.A:
        rows.append(list(row) + [0] * m)
    for row in fm.B:
        rows.append([0] * m + list(row))
    for k, b in enumerate(work.branches):
        row: list[Number] = [0] * (2 * m)
        if b.kind == "capacitor":
            row[k] = Fraction(-1)
            row[m + k] = lam * reactance_value(work, b, op)
        elif b.kind == "inductor":
            row[k] = -lam * reactance_value(work, b, op)
            row[m + k] = Fraction(1)
        elif b.kind == "memristor":
            pval, qval = device_pair(work, b, op)
            row[k] = -qval
            row[m + k] = pval
        else:  # resistor (including converted sources)
            f = _require_characteristic(b)
            bindings = _branch_bindings(work, b, op)
            row[k] = _partial(f, "i", bindings)
            row[m + k] = _partial(f, "v", bindings)
        rows.append(row)
    return rows


def pencil_oracle(c: Circuit, op: OperatingPoint,
                  tol: float = RESIDUAL_TOL) -> list[Number]:
    """Coefficient vector of det(lambda E - J) times lambda^(memristors),
    computed by evaluation at integer shifts and interpolation."""
    _require_solution(c, op, tol, equilibrium=True)
    m_w = sum(1 for b in c.branches if b.kind == "memristor")
    degree = sum(1 for b in c.branches if b.kind in ("capacitor", "inductor"))

    # Sample points 0, 1, -1, 2, -2, ...
    points: list[Fraction] = [Fraction(0)]
    step = 1
    while len(points) < degree + 1:
        points.append(Fraction(step))
        if len(points) < degree + 1:
            points.append(Fraction(-step))
        step += 1

    dets = [determinant(_pencil_matrix(c, op, lam)) for lam in points]
    if all(d == 0 for d in dets):
        raise AnalysisError("pencil determinant vanishes at every sample "
                            "shift (structural singularity)")

    exact = all(isinstance(d, (int, Fraction)) for d in dets)
    if exact:
        coeffs = _interpolate_exact(points, dets)
    else:
        vand = np.vander([float(t) for t in points], degree + 1, increasing=True)
        coeffs = list(np.linalg.solve(vand, np.array([float(d) for d in dets])))
    coeffs = [Fraction(0)] * m_w + list(coeffs)
    while len(coeffs) > 1 and (coeffs[-1] == 0 or
                               (isinstance(coeffs[-1], float)
                                and abs(coeffs[-1]) < 1e-300)):
        coeffs.pop()
    return coeffs


def _interpolate_exact(points: Sequence[Fraction],
                       values: Sequence[Number]) -> list[Fraction]:
    """Lagrange interpolation with exact rational arithmetic."""
    n = len(points)
    coeffs = [Fraction(0)] * n
    for j in range(n):
        basis = [Fraction(1)]
        denom = Fraction(1)
        for k in range(n):
            if k == j:
                continue
            denom *= points[j] - points[k]
            new = [Fraction(0)] * (len(basis) + 1)
            for deg, cf in enumerate(basis):
                new[deg] += cf * (-points[k])
                new[deg + 1] += cf
            basis = new
        scale = Fraction(values[j]) / denom
        for deg, cf in enumerate(basis):
            coeffs[deg] += cf * scale
    return coeffs


# ---------------------------------------------------------------------------
# Equilibrium solving (damped Newton, least-squares steps)


def solve_equilibrium(c: Circuit, guess: OperatingPoint, tol: float = 1e-10,
                      max_iter: int = 50) -> OperatingPoint:
    """Newton on [i_c; v_l; i_m; v_m; A i; B v; f_r] = 0 with step halving.

    Memristor states (sigma, phi) are frozen at the guess, since memristive
    equilibria form continua; their currents and voltages are solved to 0.
    """
    work = sources_as_submersions(c)
    fm = gr.fundamental_matrices(work, gr.reference_tree(work))
    m = len(work.branches)
    params = work.param_values()

    frozen: dict[str, tuple[Number, Number]] = {}
    for b in c.branches:
        if b.kind == "memristor":
            frozen[b.name] = (guess.get(b.name, "sigma"), guess.get(b.name, "phi"))

    x = np.zeros(2 * m)
    for k, b in enumerate(work.branches):
        x[k] = float(guess.get(b.name, "i"))
        x[m + k] = float(guess.get(b.name, "v"))

    a_mat = np.array(fm.A, dtype=float)
    b_mat = np.array(fm.B, dtype=float)

    def residual_and_jacobian(vec: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        res_rows: list[float] = []
        jac_rows: list[np.ndarray] = []
        kcl = a_mat @ vec[:m]
        for r, row in enumerate(a_mat):
            res_rows.append(kcl[r])
            jac_rows.append(np.concatenate([row, np.zeros(m)]))
        kvl = b_mat @ vec[m:]
        for r, row in enumerate(b_mat):
            res_rows.append(kvl[r])
            jac_rows.append(np.concatenate([np.zeros(m), row]))
        for k, b in enumerate(work.branches):
            if b.kind == "capacitor":
                res_rows.append(vec[k])
                jr = np.zeros(2 * m)
                jr[k] = 1.0
                jac_rows.append(jr)
            elif b.kind == "inductor":
                res_rows.append(vec[m + k])
                jr = np.zeros(2 * m)
                jr[m + k] = 1.0
                jac_rows.append(jr)
            elif b.kind == "memristor":
                for col in (k, m + k):
                    res_rows.append(vec[col])
                    jr = np.zeros(2 * m)
                    jr[col] = 1.0
                    jac_rows.append(jr)
            else:  # resistor
                f = _require_characteristic(b)
                bindings = dict(params)
                bindings.update({"i": vec[k], "v": vec[m + k]})
                res_rows.append(float(ex.evaluate(f, bindings)))
                jr = np.zeros(2 * m)
                jr[k] = float(ex.evaluate(ex.diff(f, "i"), bindings))
                jr[m + k] = float(ex.evaluate(ex.diff(f, "v"), bindings))
                jac_rows.append(jr)
        return np.array(res_rows), np.array(jac_rows)

    res, jac = residual_and_jacobian(x)
    norm = float(np.max(np.abs(res))) if res.size else 0.0
    for _ in range(max_iter):
        if norm <= tol:
            break
        step, *_ = np.linalg.lstsq(jac, -res, rcond=None)
        if not np.all(np.isfinite(step)):
            raise AnalysisError("singular Jacobian at a Newton iterate")
        scale = 1.0
        for _halving in range(21):
            trial = x + scale * step
            trial_res, trial_jac = residual_and_jacobian(trial)
            trial_norm = float(np.max(np.abs(trial_res))) if trial_res.size else 0.0
            if trial_norm < norm or trial_norm <= tol:
                x, res, jac, norm = trial, trial_res, trial_jac, trial_norm
                break
            scale *= 0.5
        else:
            raise AnalysisError("Newton step failed to reduce the residual")
    if norm > tol:
        raise AnalysisError(
            f"no convergence in {max_iter} iterations (residual {norm:.3e})")

    data: dict[str, dict[str, Number]] = {}
    for k, b in enumerate(work.branches):
        entry: dict[str, Number] = {
            "i": _snap(x[k]),
            "v": _snap(x[m + k]),
        }
        if b.name in frozen:
            entry["sigma"], entry["phi"] = frozen[b.name]
        data[b.name] = entry
    return OperatingPoint.from_dict(data)


def _snap(value: float) -> Number:
    # Exact zeros keep later rational-arithmetic claims (e.g. a vanishing
    # polynomial constant term at a bifurcation value) exact.
    return Fraction(0) if abs(value) < 1e-12 else value
