"""Named example schemes, with the verdicts they are expected to produce.

Each fixture builds a DetScheme.  ``expect`` lists known outcomes:
``gate`` is the inequality max n2 < 2 min n1 for the minimal resolution of
I, ``simple`` whether 0Hom_A(I/I^2, I/I^2) is one-dimensional.  None means
no outcome is claimed.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

from .detinput import DegreeMatrix, DetScheme, build_matrix, parse_grid, scheme_from_entries
from .ring import CoeffField, PolyRing, random_form


@dataclass
class Fixture:
    name: str
    note: str
    build: Callable[[int, Optional[CoeffField]], DetScheme] = field(repr=False)
    expect: Dict[str, Optional[object]] = field(default_factory=dict)

    def scheme(self, seed: int = 0, field_: Optional[CoeffField] = None) -> DetScheme:
        return self.build(seed, field_)


def _grid_fixture(grid: Sequence[Sequence[int]], n: int):
    def build(seed, field_=None):
        return build_matrix(DegreeMatrix.from_grid(grid, n), seed=seed, field=field_)
    return build


def _twisted_cubic(seed, field_=None):
    ring = PolyRing(4, field_ or CoeffField())
    return scheme_from_entries(ring, [["x0", "x1", "x2"], ["x1", "x2", "x3"]])


def _x2_squared(seed, field_=None):
    ring = PolyRing(5, field_ or CoeffField())
    f = random_form(ring, 2, seed)
    x = ring.gens()
    return scheme_from_entries(ring, [[x[0], x[1], x[2] * x[2]], [x[3], x[4], f]])


def scroll_matrix(blocks: Sequence[int], field_: Optional[CoeffField] = None) -> DetScheme:
    """Two rows of catalecticant blocks, block i in a_i + 1 fresh variables."""
    if any(a < 1 for a in blocks):
        raise ValueError("scroll blocks need a_i >= 1")
    nvars = sum(a + 1 for a in blocks)
    ring = PolyRing(nvars, field_ or CoeffField())
    x = ring.gens()
    top, bottom = [], []
    pos = 0
    for a in blocks:
        top.extend(x[pos + j] for j in range(a))
        bottom.extend(x[pos + j + 1] for j in range(a))
        pos += a + 1
    return scheme_from_entries(ring, [top, bottom])


def _scroll(blocks):
    return lambda seed, field_=None: scroll_matrix(blocks, field_)


FIXTURES: Dict[str, Fixture] = {}


def _add(fx: Fixture) -> None:
    FIXTURES[fx.name] = fx


_add(Fixture("twisted-cubic", "rational normal curve in P^3, 2x3 catalecticant", _twisted_cubic,
             {"betti": {"1": {"2": 3}, "2": {"3": 2}}, "degree": 3, "gate": True}))
_add(Fixture("p3-curve-linear", "ACM curve in P^3, generic 2x3 linear matrix",
             _grid_fixture([[1, 1, 1], [1, 1, 1]], 3), {"gate": True, "simple": None}))
_add(Fixture("p3-curve-112", "ACM curve in P^3, degree grid (1 1 2 / 1 1 2): the gate is 4 < 4",
             _grid_fixture([[1, 1, 2], [1, 1, 2]], 3), {"gate": False, "simple": False}))
for _g in ("122", "222", "322", "331"):
    _row = [int(ch) for ch in _g]
    _add(Fixture(f"p3-curve-{_g}", f"ACM curve in P^3, degree grid ({' '.join(_g)} / {' '.join(_g)})",
                 _grid_fixture([_row, _row], 3), {"gate": True, "simple": True}))
_add(Fixture("p4-curve-linear", "determinantal curve in P^4, generic 2x4 linear matrix",
             _grid_fixture([[1] * 4, [1] * 4], 4), {"gate": True, "simple": None}))
_add(Fixture("p4-curve-1222", "determinantal curve in P^4, degree grid (1 2 2 2 / 1 2 2 2)",
             _grid_fixture([[1, 2, 2, 2], [1, 2, 2, 2]], 4), {"gate": False, "simple": None}))
_add(Fixture("p4-curve-2222", "determinantal curve in P^4, all entries quadrics",
             _grid_fixture([[2] * 4, [2] * 4], 4), {"gate": True, "simple": True}))
_add(Fixture("x2-squared-surface",
             "surface in P^4 from [[x0, x1, x2^2], [x3, x4, f]], f a general quadric; "
             "I is resolved by 0 -> R(-4)^2 -> R(-3)^2 + R(-2)",
             _x2_squared, {"n1": [2, 3, 3], "n2": [4, 4], "gate": False, "simple": False}))
_add(Fixture("scroll-S(2,1)", "rational normal scroll S(2,1) in P^4", _scroll((2, 1)),
             {"degree": 3}))
_add(Fixture("scroll-S(1,1,1)", "rational normal scroll S(1,1,1) in P^5 (Segre P^1 x P^2)",
             _scroll((1, 1, 1)), {"degree": 3}))


def get_fixture(name: str, fixtures_dir: Optional[str] = None) -> Fixture:
    """A built-in fixture, or one read from ``fixtures_dir/name.json``.

    The file format is {"grid": [[...]], "n": n} or {"entries": [[...]], "n": n},
    with optional "note" and "expect".
    """
    if fixtures_dir:
        path = os.path.join(fixtures_dir, name + ".json")
        if os.path.exists(path):
            return load_fixture(path)
    if name not in FIXTURES:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(FIXTURES))}")
    return FIXTURES[name]


def load_fixture(path: str) -> Fixture:
    with open(path) as fh:
        data = json.load(fh)
    name = data.get("name") or os.path.splitext(os.path.basename(path))[0]
    n = int(data["n"])
    if "grid" in data:
        grid = data["grid"] if isinstance(data["grid"], list) else parse_grid(data["grid"])
        build = _grid_fixture(grid, n)
    elif "entries" in data:
        entries = data["entries"]

        def build(seed, field_=None):
            return scheme_from_entries(PolyRing(n + 1, field_ or CoeffField()), entries)
    else:
        raise ValueError(f"fixture {path} needs 'grid' or 'entries'")
    return Fixture(name, data.get("note", ""), build, data.get("expect", {}))
