"""Homogeneous pairs, device linearization, passivity and the
associate-submersion check.

A device with implicit characteristic f(i, v) = 0 linearizes at a point
of the characteristic to the projective pair (df/dv : -df/di); two
defining functions of the same curve differ by a nowhere-zero factor
gamma, which is computable off the zero set as a plain ratio and on it
through the gradients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from . import expr as ex
from .expr import Expression, Number

DEGENERATE_TOL = 1e-12


class DegenerateDifferentialError(ValueError):
    """The differential of a characteristic vanishes where it must not."""


class PatchError(ValueError):
    """Dehomogenization requested outside the corresponding affine patch."""


@dataclass(frozen=True)
class HomogPair:
    p: Number
    q: Number

    def __post_init__(self):
        if self.p == 0 and self.q == 0:
            raise DegenerateDifferentialError("pair (0 : 0) is not projective")

    def projectively_equal(self, other: "HomogPair", tol: float = 1e-9) -> bool:
        cross = self.p * other.q - other.p * self.q
        scale = max(abs(self.p), abs(self.q)) * max(abs(other.p), abs(other.q))
        return abs(cross) <= tol * max(scale, 1e-300)


def _partials(f: Expression, names: tuple[str, str],
              bindings: Mapping[str, Number]) -> tuple[Number, Number]:
    return (ex.evaluate(ex.diff(f, names[0]), bindings),
            ex.evaluate(ex.diff(f, names[1]), bindings))


def homog_pair(f: Expression, names: tuple[str, str],
               bindings: Mapping[str, Number]) -> HomogPair:
    """Pair (df/d second : -df/d first) at the point; for resistors
    names = (i, v) gives the homogeneous incremental resistance, for
    memristors names = (sigma, phi) gives the homogeneous memristance."""
    d_first, d_second = _partials(f, names, bindings)
    if abs(d_first) <= DEGENERATE_TOL and abs(d_second) <= DEGENERATE_TOL:
        raise DegenerateDifferentialError(
            "characteristic is not a submersion at the given point")
    return HomogPair(d_second, -d_first)


def homog_resistance(f: Expression, at: tuple[Number, Number],
                     params: Mapping[str, Number] | None = None) -> HomogPair:
    i, v = at
    bindings = dict(params or {})
    bindings.update({"i": i, "v": v})
    return homog_pair(f, ("i", "v"), bindings)


def homog_memristance(f: Expression, at: tuple[Number, Number],
                      params: Mapping[str, Number] | None = None) -> HomogPair:
    sigma, phi = at
    bindings = dict(params or {})
    bindings.update({"sigma": sigma, "phi": phi})
    return homog_pair(f, ("sigma", "phi"), bindings)


def dehomogenize(h: HomogPair, control: str) -> Number:
    """Resistance q/p under current control, conductance p/q under voltage."""
    if control == "current":
        if abs(h.p) <= DEGENERATE_TOL:
            raise PatchError("pair lies outside the current-controlled patch")
        return h.q / h.p if not isinstance(h.q, int) else Fraction(h.q, 1) / h.p
    if control == "voltage":
        if abs(h.q) <= DEGENERATE_TOL:
            raise PatchError("pair lies outside the voltage-controlled patch")
        return h.p / h.q if not isinstance(h.p, int) else Fraction(h.p, 1) / h.q
    raise ValueError(f"unknown control {control!r}")


def is_strictly_locally_passive(f: Expression, at: tuple[Number, Number],
                                params: Mapping[str, Number] | None = None) -> bool:
    """True iff f_v and f_i are both nonzero with opposite signs at the point."""
    i, v = at
    bindings = dict(params or {})
    bindings.update({"i": i, "v": v})
    f_i, f_v = _partials(f, ("i", "v"), bindings)
    return abs(f_v) > DEGENERATE_TOL and abs(f_i) > DEGENERATE_TOL and f_v * f_i < 0


# ---------------------------------------------------------------------------
# The gamma factor between two defining functions


def gamma_at(f1: Expression, f2: Expression, x: tuple[Number, Number],
             names: tuple[str, str] = ("i", "v"),
             params: Mapping[str, Number] | None = None) -> Number:
    """The factor gamma with f1 = gamma * f2 near x.

    Off the zero set of f2 this is the plain ratio f1/f2; on it (residual
    below a gradient-scaled threshold) the ratio of partial derivatives
    along the steepest direction of f2 is used instead.
    """
    bindings = dict(params or {})
    bindings.update({names[0]: x[0], names[1]: x[1]})
    value2 = ex.evaluate(f2, bindings)
    g1, g2 = _partials(f2, names, bindings)
    grad_mag = math.hypot(float(g1), float(g2))
    eps = 1e-9 * (1.0 + grad_mag)
    if abs(value2) > eps:
        value1 = ex.evaluate(f1, bindings)
        return value1 / value2 if not isinstance(value1, int) else Fraction(value1) / value2
    if grad_mag <= DEGENERATE_TOL:
        raise DegenerateDifferentialError(
            f"f2 is degenerate at a zero-set point {tuple(float(t) for t in x)}")
    w = names[0] if abs(g1) >= abs(g2) else names[1]
    num = ex.evaluate(ex.diff(f1, w), bindings)
    den = ex.evaluate(ex.diff(f2, w), bindings)
    return num / den if not isinstance(num, int) else Fraction(num) / den


# ---------------------------------------------------------------------------
# Associate check over a sampled rectangle


@dataclass
class AssociatesReport:
    associates: bool
    gamma_min_abs: float
    gamma_max_abs: float
    zero_set_mismatches: list[tuple[float, float, float, float]] = field(
        default_factory=list)
    samples: int = 0
    gamma_threshold: float = 1e-8
    zero_eps_policy: str = "1e-9*(1+|grad f|)"


def _bisect_zero(f: Expression, a: tuple[float, float], b: tuple[float, float],
                 names: tuple[str, str], tol: float,
                 bindings: dict) -> tuple[float, float]:
    """Bisection along the segment a-b for a sign change of f."""

    def value(t: float) -> float:
        pt = (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))
        bindings[names[0]], bindings[names[1]] = pt
        return float(ex.evaluate(f, bindings))

    lo, hi = 0.0, 1.0
    flo = value(lo)
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        fmid = value(mid)
        if abs(fmid) <= tol:
            lo = hi = mid
            break
        if (flo < 0) != (fmid < 0):
            hi = mid
        else:
            lo, flo = mid, fmid
    t = 0.5 * (lo + hi)
    return (a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1]))


def check_associates(f1: Expression, f2: Expression,
                     domain: tuple[float, float, float, float],
                     grid: int = 32, tol: float = 1e-8,
                     names: tuple[str, str] = ("i", "v"),
                     params: Mapping[str, Number] | None = None) -> AssociatesReport:
    """Sampled test of Definition-1 associateness on a rectangle.

    A pass is evidence (semi-decision); a fail carries a witness cell
    edge where exactly one of the two zero sets crosses.
    """
    if grid < 8:
        raise ValueError("grid must be at least 8")
    x_lo, x_hi, y_lo, y_hi = domain
    base = dict(params or {})

    xs = [x_lo + (x_hi - x_lo) * k / grid for k in range(grid + 1)]
    ys = [y_lo + (y_hi - y_lo) * k / grid for k in range(grid + 1)]

    def values(f: Expression) -> list[list[float]]:
        out = []
        for x in xs:
            row = []
            for y in ys:
                base[names[0]], base[names[1]] = x, y
                row.append(float(ex.evaluate(f, base)))
            out.append(row)
        return out

    v1 = values(f1)
    v2 = values(f2)

    gammas: list[float] = []
    mismatches: list[tuple[float, float, float, float]] = []
    samples = 0

    def node_eps(f: Expression, x: float, y: float) -> float:
        base[names[0]], base[names[1]] = x, y
        g1, g2 = _partials(f, names, base)
        return 1e-9 * (1.0 + math.hypot(float(g1), float(g2)))

    # Grid nodes sitting on a zero set: evaluate gamma there directly
    # (this also surfaces degenerate differentials at exact zeros).
    for ix, x in enumerate(xs):
        for iy, y in enumerate(ys):
            on1 = abs(v1[ix][iy]) <= node_eps(f1, x, y)
            on2 = abs(v2[ix][iy]) <= node_eps(f2, x, y)
            if on1 or on2:
                gammas.append(abs(float(gamma_at(f1, f2, (x, y), names, params))))
                samples += 1
            elif abs(v2[ix][iy]) > 0:
                gammas.append(abs(v1[ix][iy] / v2[ix][iy]))
                samples += 1

    # Cell edges: wherever one function changes sign the other must too.
    def edge_endpoints():
        for ix in range(grid + 1):
            for iy in range(grid):
                yield (ix, iy), (ix, iy + 1)
        for ix in range(grid):
            for iy in range(grid + 1):
                yield (ix, iy), (ix + 1, iy)

    for (ax, ay), (bx, by) in edge_endpoints():
        pa = (xs[ax], ys[ay])
        pb = (xs[bx], ys[by])
        s1a, s1b = v1[ax][ay], v1[bx][by]
        s2a, s2b = v2[ax][ay], v2[bx][by]
        change1 = s1a * s1b < 0
        change2 = s2a * s2b < 0
        near2 = abs(s2a) <= node_eps(f2, *pa) or abs(s2b) <= node_eps(f2, *pb)
        near1 = abs(s1a) <= node_eps(f1, *pa) or abs(s1b) <= node_eps(f1, *pb)
        # a zero set may pass exactly through a grid node: count that as
        # a crossing too, else aligned lines would never witness anything
        cross1 = change1 or near1
        cross2 = change2 or near2
        if cross1 != cross2:
            mismatches.append((pa[0], pa[1], pb[0], pb[1]))
            continue
        if change1:
            zero = _bisect_zero(f1, pa, pb, names, tol, dict(base))
            gammas.append(abs(float(gamma_at(f1, f2, zero, names, params))))
            samples += 1

    gamma_min = min(gammas) if gammas else 0.0
    gamma_max = max(gammas) if gammas else 0.0
    ok = not mismatches and gamma_min > tol
    return AssociatesReport(associates=ok, gamma_min_abs=gamma_min,
                            gamma_max_abs=gamma_max,
                            zero_set_mismatches=mismatches,
                            samples=samples, gamma_threshold=tol)
