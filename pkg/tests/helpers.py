"""Shared instance lists for the tests."""

from detnorm.detinput import DegreeMatrix, build_matrix


def linear(t, c, n, seed=0):
    return build_matrix(DegreeMatrix.linear(t, c, n), seed=seed)


def mixed(t, c, n, a, b, seed=0):
    return build_matrix(DegreeMatrix(t, c, n, tuple(a), tuple(b)), seed=seed)


# (label, builder) pairs spanning t in {2, 3}, c in {2, 3, 4}, linear and mixed degrees 1, 2
DIAGRAM_INSTANCES = [
    ("lin-2-2-3", lambda: linear(2, 2, 3, 1)),
    ("lin-2-2-4", lambda: linear(2, 2, 4, 2)),
    ("lin-2-3-4", lambda: linear(2, 3, 4, 3)),
    ("lin-2-3-5", lambda: linear(2, 3, 5, 4)),
    ("lin-2-4-4", lambda: linear(2, 4, 4, 5)),
    ("lin-2-4-5", lambda: linear(2, 4, 5, 6)),
    ("lin-3-2-3", lambda: linear(3, 2, 3, 7)),
    ("lin-3-2-4", lambda: linear(3, 2, 4, 8)),
    ("lin-3-3-3", lambda: linear(3, 3, 3, 9)),
    ("lin-3-3-4", lambda: linear(3, 3, 4, 10)),
    ("lin-3-4-4", lambda: linear(3, 4, 4, 11)),
    ("mix-2-2-3-cols", lambda: mixed(2, 2, 3, (1, 1, 2), (0, 0), 12)),
    ("mix-2-2-3-rows", lambda: mixed(2, 2, 3, (2, 2, 2), (0, 1), 13)),
    ("mix-2-3-3", lambda: mixed(2, 3, 3, (1, 1, 2, 2), (0, 0), 14)),
    ("mix-2-3-4-rows", lambda: mixed(2, 3, 4, (2, 2, 2, 2), (0, 1), 15)),
    ("mix-2-4-4", lambda: mixed(2, 4, 4, (1, 1, 1, 2, 2), (0, 0), 16)),
    ("mix-3-2-3", lambda: mixed(3, 2, 3, (1, 1, 2, 2), (0, 0, 0), 17)),
    ("mix-3-2-3-rows", lambda: mixed(3, 2, 3, (2, 2, 2, 2), (0, 0, 1), 18)),
    ("mix-3-3-3", lambda: mixed(3, 3, 3, (1, 1, 1, 2, 2), (0, 0, 0), 19)),
    ("mix-3-4-4", lambda: mixed(3, 4, 4, (1, 1, 1, 1, 2, 2), (0, 0, 0), 20)),
]
