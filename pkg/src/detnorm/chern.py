"""Chern classes on a codimension 2 linear determinantal scheme.

Classes live in the free truncated ring Q[H, Y] / (degree > 2).  No relations
among H^2, HY, Y^2 are imposed, so two classes agree only when every
coefficient does.

The normal sheaf twisted by -H has the four term resolution

    0 -> O(-H) -> O(Y - 2H)^t -> O(Y - H)^(t+1) -> N(-H) -> 0

and its Chern polynomial is the alternating product of the line bundle terms.
``exclude_cases`` compares it with the four extensions of Ulrich line bundles
O(-Y + tH) and O(2Y - 2H).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Dict, List, Optional, Tuple

Exponent = Tuple[int, int]  # (power of H, power of Y)
MAX_DEGREE = 2


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class ChowElement:
    """Truncated polynomial in H and Y with rational coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Exponent, object]] = None):
        self.terms: Dict[Exponent, Fraction] = {}
        for e, c in (terms or {}).items():
            if sum(e) <= MAX_DEGREE and c:
                self.terms[e] = self.terms.get(e, Fraction(0)) + _q(c)
        self.terms = {e: c for e, c in self.terms.items() if c}

    @classmethod
    def linear(cls, y=0, h=0) -> "ChowElement":
        """The divisor class yY + hH."""
        return cls({(0, 1): y, (1, 0): h})

    @classmethod
    def const(cls, c) -> "ChowElement":
        return cls({(0, 0): c})

    def coeff(self, h: int, y: int) -> Fraction:
        return self.terms.get((h, y), Fraction(0))

    def part(self, degree: int) -> "ChowElement":
        return ChowElement({e: c for e, c in self.terms.items() if sum(e) == degree})

    def __add__(self, other) -> "ChowElement":
        other = _as_chow(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + c
        return ChowElement(out)

    __radd__ = __add__

    def __neg__(self) -> "ChowElement":
        return ChowElement({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "ChowElement":
        return self + (-_as_chow(other))

    def __rsub__(self, other) -> "ChowElement":
        return _as_chow(other) - self

    def __mul__(self, other) -> "ChowElement":
        other = _as_chow(other)
        out: Dict[Exponent, Fraction] = {}
        for (a, b), c in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                if a + a2 + b + b2 <= MAX_DEGREE:
                    e = (a + a2, b + b2)
                    out[e] = out.get(e, Fraction(0)) + c * c2
        return ChowElement(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "ChowElement":
        out = ChowElement.const(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        try:
            return self.terms == _as_chow(other).terms
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def mismatches(self, other: "ChowElement") -> List[Tuple[str, Fraction, Fraction]]:
        """Monomials where the coefficients differ, as (name, ours, theirs)."""
        out = []
        for e in sorted(set(self.terms) | set(other.terms), key=lambda e: (sum(e), -e[1], e)):
            a, b = self.coeff(*e), other.coeff(*e)
            if a != b:
                out.append((_mono_name(e), a, b))
        return out

    def __repr__(self) -> str:
        return f"ChowElement({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), -e[1])):
            c = self.terms[e]
            name = _mono_name(e)
            if name == "1":
                parts.append(str(c))
            elif c == 1:
                parts.append(name)
            elif c == -1:
                parts.append("-" + name)
            else:
                parts.append(f"{c}{name}" if c.denominator == 1 else f"({c}){name}")
        return " + ".join(parts).replace("+ -", "- ")

    def to_json(self) -> Dict[str, str]:
        return {_mono_name(e): str(c) for e, c in sorted(self.terms.items())}


def _mono_name(e: Exponent) -> str:
    h, y = e
    bits = []
    if y:
        bits.append("Y" if y == 1 else f"Y^{y}")
    if h:
        bits.append("H" if h == 1 else f"H^{h}")
    return "".join(bits) or "1"


def _as_chow(x) -> ChowElement:
    if isinstance(x, ChowElement):
        return x
    if isinstance(x, (int, Fraction)):
        return ChowElement.const(x)
    raise TypeError(f"cannot use {type(x).__name__} as a Chow class")


# -- Chern polynomials: lists [c_0, c_1, c_2] ------------------------------------------------

Series = List[ChowElement]


def series_mul(p: Series, q: Series) -> Series:
    out = [ChowElement() for _ in range(MAX_DEGREE + 1)]
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            if i + j <= MAX_DEGREE:
                out[i + j] = out[i + j] + a * b
    return out


def series_inverse(p: Series) -> Series:
    """Inverse of a series with constant term 1, to order u^2."""
    if p[0] != ChowElement.const(1):
        raise ValueError("series must start with 1")
    inv = [ChowElement.const(1)]
    for k in range(1, MAX_DEGREE + 1):
        acc = ChowElement()
        for j in range(1, k + 1):
            if j < len(p):
                acc = acc + p[j] * inv[k - j]
        inv.append(-acc)
    return inv


def line_bundle(D: ChowElement) -> Series:
    """c_u(O(D)) = 1 + D u."""
    return [ChowElement.const(1), D, ChowElement()]


def series_pow(p: Series, k: int) -> Series:
    out = [ChowElement.const(1), ChowElement(), ChowElement()]
    for _ in range(k):
        out = series_mul(out, p)
    return out


@dataclass
class ChernClasses:
    c1: ChowElement
    c2: ChowElement

    def to_json(self) -> Dict:
        return {"c1": str(self.c1), "c2": str(self.c2)}


H = ChowElement.linear(h=1)
Y = ChowElement.linear(y=1)


def chern_from_sequence(t: int) -> ChernClasses:
    """c_1, c_2 of N(-H) from its resolution by sums of O(-H), O(Y-2H), O(Y-H)."""
    if t < 2:
        raise ValueError("t must be at least 2")
    num = series_mul(line_bundle(-H), series_pow(line_bundle(Y - H), t + 1))
    den = series_pow(line_bundle(Y - 2 * H), t)
    q = series_mul(num, series_inverse(den))
    return ChernClasses(q[1], q[2])


def expected_chern(t: int) -> ChernClasses:
    """Closed forms: c_1 = Y + (t-2)H, c_2 = -YH + (t^2 - t + 2)/2 H^2."""
    return ChernClasses(ChowElement.linear(1, t - 2),
                        ChowElement({(1, 1): -1, (2, 0): Fraction(t * t - t + 2, 2)}))


def ulrich_line_bundles(t: int) -> Dict[str, ChowElement]:
    return {"L1": ChowElement.linear(-1, t), "L2": ChowElement.linear(2, -2)}


def extension_chern(sub: ChowElement, quo: ChowElement) -> ChernClasses:
    """Chern classes of an extension of O(quo) by O(sub)."""
    return ChernClasses(sub + quo, sub * quo)


@dataclass
class CaseVerdict:
    case: int
    sub: ChowElement
    quo: ChowElement
    would_be: ChernClasses
    c1_mismatch: List[Tuple[str, Fraction, Fraction]]
    c2_mismatch: List[Tuple[str, Fraction, Fraction]]

    @property
    def excluded(self) -> bool:
        return bool(self.c1_mismatch or self.c2_mismatch)

    @property
    def first_mismatch(self) -> Optional[str]:
        for cls, mm in (("c1", self.c1_mismatch), ("c2", self.c2_mismatch)):
            if mm:
                name, a, b = mm[0]
                return f"{cls} coefficient of {name}: {a} vs {b}"
        return None

    def to_json(self) -> Dict:
        return {"case": self.case, "sub": str(self.sub), "quotient": str(self.quo),
                "would_be": self.would_be.to_json(), "excluded": self.excluded,
                "first_mismatch": self.first_mismatch}


@dataclass
class ExclusionReport:
    t: int
    actual: ChernClasses
    cases: List[CaseVerdict]

    @property
    def all_excluded(self) -> bool:
        return all(c.excluded for c in self.cases)

    def to_json(self) -> Dict:
        return {"t": self.t, "actual": self.actual.to_json(),
                "cases": [c.to_json() for c in self.cases],
                "all_excluded": self.all_excluded,
                "note": "classes compared coefficient-wise in the free ring on H, Y; "
                        "independence of H^2, HY, Y^2 is assumed, not verified"}

    def render(self) -> str:
        lines = [f"t = {self.t}: c1(N(-H)) = {self.actual.c1}, c2(N(-H)) = {self.actual.c2}"]
        for c in self.cases:
            status = "excluded" if c.excluded else "NOT excluded"
            lines.append(f"  case {c.case}: 0 -> O({c.sub}) -> N(-H) -> O({c.quo}) -> 0  "
                         f"c1 = {c.would_be.c1}, c2 = {c.would_be.c2}: {status}"
                         + (f" ({c.first_mismatch})" if c.first_mismatch else ""))
        return "\n".join(lines)


def exclude_cases(t: int) -> ExclusionReport:
    """Test the four extensions of Ulrich line bundles against the actual classes."""
    actual = chern_from_sequence(t)
    L = ulrich_line_bundles(t)
    order = [(L["L1"], L["L1"]), (L["L2"], L["L1"]), (L["L1"], L["L2"]), (L["L2"], L["L2"])]
    cases = []
    for k, (sub, quo) in enumerate(order, start=1):
        wb = extension_chern(sub, quo)
        cases.append(CaseVerdict(k, sub, quo, wb, wb.c1.mismatches(actual.c1),
                                 wb.c2.mismatches(actual.c2)))
    return ExclusionReport(t, actual, cases)


@dataclass
class Slope:
    """deg(c_1)/rank with the pairings H^d and Y.H^(d-1) left as symbols.

    ``numerator`` is (coefficient of Y.H^(d-1), coefficient of H^d).
    """
    c1: ChowElement
    rank: int

    @property
    def numerator(self) -> Tuple[Fraction, Fraction]:
        return self.c1.coeff(0, 1), self.c1.coeff(1, 0)

    @property
    def value(self) -> Tuple[Fraction, Fraction]:
        y, h = self.numerator
        return y / self.rank, h / self.rank

    def twist(self, D: ChowElement) -> "Slope":
        """Slope of E(D): c_1 moves by rank * D."""
        return Slope(self.c1 + self.rank * D.part(1), self.rank)

    def __eq__(self, other) -> bool:
        return isinstance(other, Slope) and self.value == other.value

    def __str__(self) -> str:
        y, h = self.value
        return f"({y}) Y.H^(d-1) + ({h}) H^d"

    def to_json(self) -> Dict:
        y, h = self.value
        return {"c1": str(self.c1), "rank": self.rank, "YH^(d-1)": str(y), "H^d": str(h)}


def slope(c1: ChowElement, rank: int) -> Slope:
    if rank < 1:
        raise ValueError("slope needs rank >= 1")
    return Slope(c1.part(1), rank)
