"""Coefficient fields and sparse homogeneous polynomials.

Monomials are packed into a single Python int, ``SHIFT`` bits per variable,
so that multiplying monomials is integer addition.  Variable ``x0`` occupies
the lowest bits.
"""

from __future__ import annotations

import random
import re
from fractions import Fraction
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

SHIFT = 12
MASK = (1 << SHIFT) - 1
DEFAULT_PRIME = 32003


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p % 2 == 0:
        return p == 2
    q = 3
    while q * q <= p:
        if p % q == 0:
            return False
        q += 2
    return True


class CoeffField:
    """Either the rationals (``p is None``) or the prime field F_p."""

    __slots__ = ("p",)

    def __init__(self, p: Optional[int] = DEFAULT_PRIME):
        if p is not None and not _is_prime(int(p)):
            raise ValueError(f"{p} is not prime")
        self.p = None if p is None else int(p)

    @classmethod
    def rationals(cls) -> "CoeffField":
        return cls(None)

    @classmethod
    def prime_field(cls, p: int = DEFAULT_PRIME) -> "CoeffField":
        return cls(p)

    @property
    def kind(self) -> str:
        return "rationals" if self.p is None else "prime_field"

    def __call__(self, x):
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            return int(x.numerator) * pow(int(x.denominator), -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, x):
        if self.p is None:
            return 1 / Fraction(x)
        return pow(int(x), -1, self.p)

    def random(self, rng: random.Random):
        if self.p is None:
            return Fraction(rng.randint(-50, 50))
        return rng.randrange(self.p)

    def signed(self, x):
        """Representative used for printing: symmetric residue in F_p."""
        if self.p is None:
            return x
        return x - self.p if x > self.p // 2 else x

    def __eq__(self, other):
        return isinstance(other, CoeffField) and other.p == self.p

    def __hash__(self):
        return hash(("CoeffField", self.p))

    def __repr__(self):
        return "QQ" if self.p is None else f"GF({self.p})"


def pack(exps: Sequence[int]) -> int:
    m = 0
    for i, e in enumerate(exps):
        m |= e << (SHIFT * i)
    return m


def unpack(m: int, nvars: int) -> Tuple[int, ...]:
    return tuple((m >> (SHIFT * i)) & MASK for i in range(nvars))


@lru_cache(maxsize=None)
def _monomials(nvars: int, d: int) -> Tuple[int, ...]:
    out = []
    for combo in combinations_with_replacement(range(nvars), d):
        m = 0
        for v in combo:
            m += 1 << (SHIFT * v)
        out.append(m)
    out.sort(key=lambda m: grevlex_key(m, nvars), reverse=True)
    return tuple(out)


@lru_cache(maxsize=None)
def _monomial_index(nvars: int, d: int) -> Dict[int, int]:
    return {m: k for k, m in enumerate(_monomials(nvars, d))}


def grevlex_key(m: int, nvars: int):
    e = unpack(m, nvars)
    return (sum(e), tuple(-x for x in reversed(e)))


class PolyRing:
    """R = K[x0, ..., x_{nvars-1}] with the standard grading."""

    __slots__ = ("nvars", "field")

    def __init__(self, nvars: int, field: Optional[CoeffField] = None):
        if nvars < 1:
            raise ValueError("need at least one variable")
        self.nvars = int(nvars)
        self.field = field if field is not None else CoeffField()

    @property
    def n(self) -> int:
        return self.nvars - 1

    def __eq__(self, other):
        return isinstance(other, PolyRing) and other.nvars == self.nvars and other.field == self.field

    def __hash__(self):
        return hash((self.nvars, self.field))

    def __repr__(self):
        return f"PolyRing({self.nvars}, {self.field!r})"

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return Polynomial(self, {0: self.field(1)}, _trusted=True, _degree=0)

    def const(self, c) -> "Polynomial":
        c = self.field(c)
        return Polynomial(self, {0: c} if c else {}, _trusted=True, _degree=0 if c else None)

    def var(self, i: int) -> "Polynomial":
        if not 0 <= i < self.nvars:
            raise IndexError(i)
        return Polynomial(self, {1 << (SHIFT * i): self.field(1)}, _trusted=True, _degree=1)

    def gens(self) -> List["Polynomial"]:
        return [self.var(i) for i in range(self.nvars)]

    def monomials(self, d: int) -> Tuple[int, ...]:
        if d < 0:
            return ()
        return _monomials(self.nvars, d)

    def monomial_index(self, d: int) -> Dict[int, int]:
        if d < 0:
            return {}
        return _monomial_index(self.nvars, d)

    def dim(self, d: int) -> int:
        return comb(self.nvars - 1 + d, d) if d >= 0 else 0

    def monomial(self, exps: Sequence[int], coeff=1) -> "Polynomial":
        if len(exps) != self.nvars:
            raise ValueError("exponent length mismatch")
        return Polynomial(self, {pack(exps): coeff})

    def from_terms(self, terms: Dict[Tuple[int, ...], object]) -> "Polynomial":
        return Polynomial(self, {pack(e): c for e, c in terms.items()})

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(self, text)

    def drop_last(self) -> "PolyRing":
        return PolyRing(self.nvars - 1, self.field)


class Polynomial:
    """Immutable homogeneous polynomial; ``degree`` is None for zero."""

    __slots__ = ("ring", "terms", "degree")

    def __init__(self, ring: PolyRing, terms: Dict[int, object], _trusted: bool = False,
                 _degree: Optional[int] = None):
        self.ring = ring
        if _trusted:
            self.terms = terms
            self.degree = _degree if terms else None
            return
        f = ring.field
        clean = {}
        for m, c in terms.items():
            if isinstance(m, tuple):
                m = pack(m)
            c = f(c)
            if c:
                clean[m] = clean.get(m, 0) + c
        clean = {m: f(c) for m, c in clean.items() if f(c)}
        deg = None
        for m in clean:
            d = sum(unpack(m, ring.nvars))
            if deg is None:
                deg = d
            elif d != deg:
                raise ValueError("inhomogeneous polynomial")
        self.terms = clean
        self.degree = deg

    # -- predicates ---------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def is_constant(self) -> bool:
        return self.degree == 0

    def constant_value(self):
        return self.terms.get(0, self.ring.field(0))

    # -- arithmetic ---------------------------------------------------------
    def _check(self, other: "Polynomial"):
        if other.ring != self.ring:
            raise ValueError("polynomials over different rings")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            if other == 0:
                return self
            return NotImplemented
        self._check(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        if self.degree != other.degree:
            raise ValueError(f"degree mismatch: {self.degree} vs {other.degree}")
        p = self.ring.field.p
        out = dict(self.terms)
        if p is None:
            for m, c in other.terms.items():
                v = out.get(m, 0) + c
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        else:
            for m, c in other.terms.items():
                v = (out.get(m, 0) + c) % p
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return Polynomial(self.ring, out, _trusted=True, _degree=self.degree)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.field.p
        if p is None:
            t = {m: -c for m, c in self.terms.items()}
        else:
            t = {m: p - c for m, c in self.terms.items()}
        return Polynomial(self.ring, t, _trusted=True, _degree=self.degree)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        f = self.ring.field
        c = f(c)
        if not c or not self.terms:
            return Polynomial(self.ring, {}, _trusted=True)
        if f.p is None:
            t = {m: v * c for m, v in self.terms.items()}
        else:
            p = f.p
            t = {m: v * c % p for m, v in self.terms.items()}
        return Polynomial(self.ring, t, _trusted=True, _degree=self.degree)

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            return self.scale(other)
        self._check(other)
        if not self.terms or not other.terms:
            return Polynomial(self.ring, {}, _trusted=True)
        p = self.ring.field.p
        out: Dict[int, object] = {}
        get = out.get
        a, b = self.terms, other.terms
        if len(a) < len(b):
            a, b = b, a
        for mb, cb in b.items():
            for ma, ca in a.items():
                m = ma + mb
                out[m] = get(m, 0) + ca * cb
        if p is None:
            out = {m: c for m, c in out.items() if c}
        else:
            out = {m: c % p for m, c in out.items() if c % p}
        return Polynomial(self.ring, out, _trusted=True, _degree=self.degree + other.degree)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k: int):
        out = self.ring.one()
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if other == 0:
            return not self.terms
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- evaluation and rendering --------------------------------------------
    def eval(self, point: Sequence) -> object:
        nv = self.ring.nvars
        if len(point) != nv:
            raise ValueError("point has wrong length")
        f = self.ring.field
        pt = [f(x) for x in point]
        p = f.p
        total = 0
        for m, c in self.terms.items():
            v = c
            for i in range(nv):
                e = (m >> (SHIFT * i)) & MASK
                if e:
                    v = v * (pow(pt[i], e, p) if p else pt[i] ** e)
            total += v
        return f(total)

    def eval_with(self, ev: "PointEvaluator") -> object:
        """Value at ``ev``'s point, reusing its cached monomial values."""
        mono = ev.monomial
        total = 0
        for m, c in self.terms.items():
            total += c * mono(m)
        return self.ring.field(total)

    def exponents(self) -> List[Tuple[Tuple[int, ...], object]]:
        nv = self.ring.nvars
        keys = sorted(self.terms, key=lambda m: grevlex_key(m, nv), reverse=True)
        return [(unpack(m, nv), self.terms[m]) for m in keys]

    def __str__(self):
        return render(self)

    def __repr__(self):
        return f"Polynomial({render(self)})"


class PointEvaluator:
    """Monomial values at a fixed point, built up one variable at a time and cached."""

    def __init__(self, ring: PolyRing, point: Sequence):
        if len(point) != ring.nvars:
            raise ValueError("point has wrong length")
        self.ring = ring
        self.point = [ring.field(x) for x in point]
        self.cache: Dict[int, object] = {0: ring.field(1)}

    def monomial(self, m: int) -> object:
        v = self.cache.get(m)
        if v is None:
            i = 0
            while not (m >> (SHIFT * i)) & MASK:
                i += 1
            v = self.ring.field(self.monomial(m - (1 << (SHIFT * i))) * self.point[i])
            self.cache[m] = v
        return v

    def __call__(self, f: "Polynomial") -> object:
        return f.eval_with(self)


def render(f: Polynomial) -> str:
    """Terms in descending grevlex order with variables x0..xn."""
    if not f.terms:
        return "0"
    field = f.ring.field
    parts = []
    for exps, c in f.exponents():
        c = field.signed(c)
        neg = c < 0
        a = -c if neg else c
        mono = "*".join(f"x{i}" if e == 1 else f"x{i}^{e}" for i, e in enumerate(exps) if e)
        if not mono:
            body = str(a)
        elif a == 1:
            body = mono
        else:
            body = f"{a}*{mono}"
        parts.append(("-" if neg else "+", body))
    first_sign, first = parts[0]
    out = ("-" if first_sign == "-" else "") + first
    for s, body in parts[1:]:
        out += f" {s} {body}"
    return out


_TERM = re.compile(r"([+-]?)\s*([^+-]+)")


def parse_polynomial(ring: PolyRing, text: str) -> Polynomial:
    """Parse sums of terms like ``3*x0^2*x1 - x2^2``."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty polynomial")
    terms: Dict[int, object] = {}
    pos = 0
    for match in _TERM.finditer(s):
        if match.start() != pos:
            raise ValueError(f"cannot parse {text!r}")
        pos = match.end()
        sign, body = match.groups()
        coeff = Fraction(1)
        exps = [0] * ring.nvars
        for factor in body.split("*"):
            if factor.startswith("x"):
                name, _, power = factor.partition("^")
                idx = int(name[1:])
                if idx >= ring.nvars:
                    raise ValueError(f"variable {name} out of range")
                exps[idx] += int(power) if power else 1
            else:
                coeff *= Fraction(factor)
        if sign == "-":
            coeff = -coeff
        m = pack(exps)
        terms[m] = terms.get(m, 0) + coeff
    if pos != len(s):
        raise ValueError(f"cannot parse {text!r}")
    return Polynomial(ring, terms)


def random_form(ring: PolyRing, d: int, seed: int) -> Polynomial:
    """Dense form of degree d with coefficients drawn from ``seed``."""
    if d <= 0:
        raise ValueError("degree must be positive")
    rng = random.Random(seed)
    field = ring.field
    while True:
        terms = {m: field.random(rng) for m in ring.monomials(d)}
        f = Polynomial(ring, terms)
        if f.terms:
            return f


def count_monomials(nvars: int, d: int) -> int:
    return comb(nvars - 1 + d, d) if d >= 0 else 0


def linear_form(ring: PolyRing, coeffs: Iterable) -> Polynomial:
    return Polynomial(ring, {1 << (SHIFT * i): c for i, c in enumerate(coeffs)})
