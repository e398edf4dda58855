"""Sparse multivariate polynomials over circuit symbols and lambda.

Coefficients are exact Fractions whenever the inputs are exact, so golden
comparisons are plain equality.  Float coefficients are tolerated for
numeric substitutions.  A monomial is a tuple of (symbol, exponent)
pairs sorted by the canonical symbol order; zero coefficients and zero
exponents are never stored.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Union

Number = Union[Fraction, int, float]

_ROLE_ORDER = {"P": 0, "Q": 1, "C": 2, "L": 3, "param": 4, "lambda": 5}


class PolyError(ValueError):
    pass


@dataclass(frozen=True)
class PolySymbol:
    role: str  # P | Q | C | L | param | lambda
    name: str = ""

    def sort_key(self) -> tuple[int, str]:
        return (_ROLE_ORDER[self.role], self.name)

    def text(self) -> str:
        if self.role == "lambda":
            return "lambda"
        if self.role == "param":
            return self.name
        return f"{self.role}_{self.name}"


LAMBDA = PolySymbol("lambda")


def P(branch: str) -> PolySymbol:
    return PolySymbol("P", branch)


def Q(branch: str) -> PolySymbol:
    return PolySymbol("Q", branch)


def cap(branch: str) -> PolySymbol:
    return PolySymbol("C", branch)


def ind(branch: str) -> PolySymbol:
    return PolySymbol("L", branch)


def param(name: str) -> PolySymbol:
    return PolySymbol("param", name)


Monomial = tuple[tuple[PolySymbol, int], ...]


def _mono(items: Iterable[tuple[PolySymbol, int]]) -> Monomial:
    merged: dict[PolySymbol, int] = {}
    for sym, exp in items:
        if exp:
            merged[sym] = merged.get(sym, 0) + exp
    return tuple(sorted(((s, e) for s, e in merged.items() if e),
                        key=lambda it: it[0].sort_key()))


class MultiPoly:
    """Immutable sparse polynomial; supports +, -, * with polys and scalars."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Number] | None = None):
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                if coeff != 0:
                    clean[mono] = coeff
        object.__setattr__(self, "terms", clean)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero() -> "MultiPoly":
        return MultiPoly()

    @staticmethod
    def constant(value: Number) -> "MultiPoly":
        return MultiPoly({(): value})

    @staticmethod
    def symbol(sym: PolySymbol, power: int = 1) -> "MultiPoly":
        return MultiPoly({((sym, power),): Fraction(1)})

    @staticmethod
    def monomial(factors: Iterable[tuple[PolySymbol, int]],
                 coeff: Number = Fraction(1)) -> "MultiPoly":
        return MultiPoly({_mono(factors): coeff})

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: "MultiPoly | Number") -> "MultiPoly":
        other = _coerce(other)
        out = dict(self.terms)
        for mono, coeff in other.terms.items():
            out[mono] = out.get(mono, Fraction(0)) + coeff
        return MultiPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "MultiPoly | Number") -> "MultiPoly":
        return self + (-_coerce(other))

    def __rsub__(self, other: "MultiPoly | Number") -> "MultiPoly":
        return _coerce(other) + (-self)

    def __mul__(self, other: "MultiPoly | Number") -> "MultiPoly":
        other = _coerce(other)
        out: dict[Monomial, Number] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono(list(m1) + list(m2))
                out[mono] = out.get(mono, Fraction(0)) + c1 * c2
        return MultiPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float, Fraction)):
            other = MultiPoly.constant(other)
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"MultiPoly({to_text(self)!r})"

    def is_zero(self) -> bool:
        return not self.terms

    def degree_in(self, sym: PolySymbol) -> int:
        best = 0
        for mono in self.terms:
            for s, e in mono:
                if s == sym:
                    best = max(best, e)
        return best

    def symbols(self) -> set[PolySymbol]:
        out: set[PolySymbol] = set()
        for mono in self.terms:
            out.update(s for s, _ in mono)
        return out


def _coerce(value: "MultiPoly | Number") -> MultiPoly:
    if isinstance(value, MultiPoly):
        return value
    return MultiPoly.constant(value)


# ---------------------------------------------------------------------------
# Structure queries and substitution


def is_multihomogeneous_in_pair(p: MultiPoly, branch: str) -> bool:
    """True iff every monomial has total degree exactly 1 in {P_b, Q_b}."""
    psym, qsym = P(branch), Q(branch)
    for mono in p.terms:
        deg = sum(e for s, e in mono if s in (psym, qsym))
        if deg != 1:
            return False
    return True


def substitute(p: MultiPoly,
               mapping: Mapping[PolySymbol, "MultiPoly | Number"]) -> MultiPoly:
    """Replace symbols by polynomials or numbers; unmapped symbols remain."""
    out = MultiPoly.zero()
    for mono, coeff in p.terms.items():
        term = MultiPoly.constant(coeff)
        residue: list[tuple[PolySymbol, int]] = []
        for sym, exp in mono:
            if sym in mapping:
                repl = _coerce(mapping[sym])
                for _ in range(exp):
                    term = term * repl
            else:
                residue.append((sym, exp))
        if residue:
            term = term * MultiPoly.monomial(residue)
        out = out + term
    return out


def eval_poly(p: MultiPoly, values: Mapping[PolySymbol, Number]) -> Number:
    """Substitute every symbol; errors if any symbol is left unbound."""
    result = substitute(p, values)
    leftover = result.symbols()
    if leftover:
        names = ", ".join(sorted(s.text() for s in leftover))
        raise PolyError(f"unbound symbols: {names}")
    return result.terms.get((), Fraction(0))


def lambda_coefficients(p: MultiPoly) -> list[MultiPoly]:
    """Split p = sum_k lambda^k * result[k]; trailing zeros trimmed."""
    buckets: dict[int, dict[Monomial, Number]] = {}
    for mono, coeff in p.terms.items():
        k = 0
        rest = []
        for sym, exp in mono:
            if sym == LAMBDA:
                k = exp
            else:
                rest.append((sym, exp))
        buckets.setdefault(k, {})[tuple(rest)] = coeff
    if not buckets:
        return [MultiPoly.zero()]
    top = max(buckets)
    return [MultiPoly(buckets.get(k, {})) for k in range(top + 1)]


def eval_lambda(p: MultiPoly, values: Mapping[PolySymbol, Number]) -> list[Number]:
    """Bind all non-lambda symbols and return the lambda coefficient vector."""
    coeffs = []
    for part in lambda_coefficients(p):
        coeffs.append(eval_poly(part, values))
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return coeffs


def dehomogenize(p: MultiPoly, choices: Mapping[str, str],
                 memristors: frozenset[str] = frozenset()) -> MultiPoly:
    """Fix one coordinate of each branch's (P, Q) pair.

    'current' control substitutes P_b -> 1 and renames Q_b to the classical
    resistance R_b (memristance M_b for memristors); 'voltage' control
    substitutes Q_b -> 1 introducing the conductance G_b (memductance W_b).
    """
    mapping: dict[PolySymbol, MultiPoly | Number] = {}
    for branch, control in choices.items():
        if not is_multihomogeneous_in_pair(p, branch):
            raise PolyError(
                f"polynomial is not multihomogeneous in branch {branch!r}")
        mem = branch in memristors
        if control == "current":
            mapping[P(branch)] = Fraction(1)
            mapping[Q(branch)] = MultiPoly.symbol(
                param(("M_" if mem else "R_") + branch))
        elif control == "voltage":
            mapping[Q(branch)] = Fraction(1)
            mapping[P(branch)] = MultiPoly.symbol(
                param(("W_" if mem else "G_") + branch))
        else:
            raise PolyError(f"unknown control {control!r} for branch {branch!r}")
    return substitute(p, mapping)


# ---------------------------------------------------------------------------
# Canonical printing (graded lexicographic, lambda last in each monomial)


def _coeff_text(c: Number) -> str:
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return str(c.numerator)
        return f"{c.numerator}/{c.denominator}"
    return repr(c)


def _mono_key(mono: Monomial):
    total = sum(e for _, e in mono)
    vec = tuple((s.sort_key(), -e) for s, e in mono)
    return (-total, vec)


def to_text(p: MultiPoly) -> str:
    if not p.terms:
        return "0"
    parts = []
    for mono in sorted(p.terms, key=_mono_key):
        coeff = p.terms[mono]
        factors = [s.text() if e == 1 else f"{s.text()}^{e}" for s, e in mono]
        if not factors:
            parts.append(_coeff_text(coeff))
        elif coeff == 1:
            parts.append("*".join(factors))
        elif coeff == -1:
            parts.append("-" + "*".join(factors))
        else:
            parts.append(_coeff_text(coeff) + "*" + "*".join(factors))
    text = parts[0]
    for part in parts[1:]:
        if part.startswith("-"):
            text += " - " + part[1:]
        else:
            text += " + " + part
    return text
