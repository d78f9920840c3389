"""Shared helpers for the test suite."""

from __future__ import annotations

import random

from tropflag.core import Subset, enumerate_subsets
from tropflag.tropical import FlagInstance, PluckerVector


def vec(n, d, ones=(), base=0, **named):
    """PluckerVector with every weight = base except the listed members."""
    table = {s: base for s in enumerate_subsets(n, d)}
    for members, value in [*((m, 1) for m in ones), *named.items()]:
        if isinstance(members, str):
            members = [int(c) for c in members]
        table[Subset.from_members(n, members)] = value
    return PluckerVector.from_weights(n, d, table)


def random_vector(n, d, rng: random.Random, lo=-3, hi=3):
    return PluckerVector.from_values(n, d, [rng.randint(lo, hi) for _ in enumerate_subsets(n, d)])


def subsets(n, *member_lists):
    return tuple(Subset.from_members(n, m) for m in member_lists)


def ex1_layers():
    """The three Delta(2,3;4) demonstration configurations."""
    x_bad = vec(4, 2, ones=["14", "23"])
    x_ok = vec(4, 2, ones=["14"])
    y_one = vec(4, 3, ones=["234"])
    y_zero = vec(4, 3)
    invalid = FlagInstance((x_bad, y_one))
    fixed_x23 = FlagInstance((x_ok, y_one))
    fixed_y234 = FlagInstance((x_bad, y_zero))
    return invalid, fixed_x23, fixed_y234
