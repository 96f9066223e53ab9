"""Exact interval-union calculus for Riesz–Sobolev and KPRGT stability audits."""

from .intervals import (
    EMPTY,
    InputError,
    Interval,
    IntervalUnion,
    affine_image,
    as_rational,
    combine,
    diameter,
    format_rational,
    measure,
    minkowski_sum,
    normalize,
    rearrange,
    reflect,
    torus_project,
    translate,
    truncate,
)
from .conv import (
    LevelResult,
    PiecewiseLinear,
    convolve_indicators,
    level_for_measure,
    pairing,
    superlevel,
    tail_integral,
)

__version__ = "0.1.0"
