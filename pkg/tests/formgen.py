"""Shared hypothesis strategies for random exact polynomials, forms, surfaces."""

import itertools
from fractions import Fraction

from hypothesis import strategies as st

from fvx.forms_core import COORD_AXES, FIVE_AXES, FiveForm, FourForm, MultiVector
from fvx.integration import ParamSurface
from fvx.lagrange import FieldSet, LagrangianSpec
from fvx.polyfield import COORD_NAMES, Poly, parse_poly


def P(text: str) -> Poly:
    return parse_poly(text, COORD_NAMES)


rationals = st.fractions(min_value=-9, max_value=9, max_denominator=9)
exponents = st.tuples(*(st.integers(0, 2) for _ in range(4)))
small_polys = st.builds(
    lambda terms: Poly(4, terms),
    st.dictionaries(exponents, rationals, max_size=2),
)


def _keyed(draw, cls, axes, rank):
    keys = list(itertools.combinations(axes, rank))
    chosen = draw(st.lists(st.sampled_from(keys), max_size=3, unique=True))
    return cls(rank, {k: draw(small_polys) for k in chosen})


@st.composite
def five_forms(draw, rank=None):
    if rank is None:
        rank = draw(st.integers(0, 5))
    return _keyed(draw, FiveForm, FIVE_AXES, rank)


@st.composite
def four_forms(draw, rank=None):
    if rank is None:
        rank = draw(st.integers(0, 4))
    return _keyed(draw, FourForm, COORD_AXES, rank)


@st.composite
def vector_fields(draw):
    return _keyed(draw, MultiVector, FIVE_AXES, 1)


@st.composite
def form_pairs_within_rank(draw, limit=5):
    ra = draw(st.integers(0, limit))
    rb = draw(st.integers(0, limit - ra))
    return draw(five_forms(rank=ra)), draw(five_forms(rank=rb))


def param_polys(m, max_deg=2, max_terms=2):
    expos = st.tuples(*(st.integers(0, max_deg) for _ in range(m))).filter(
        lambda e: sum(e) <= max_deg
    )
    return st.builds(
        lambda terms: Poly(m, terms), st.dictionaries(expos, rationals, max_size=max_terms)
    )


_bound_starts = [Fraction(0), Fraction(-1, 2), Fraction(1, 3)]
_bound_widths = [Fraction(1), Fraction(1, 2), Fraction(2)]


@st.composite
def surfaces(draw, dim=None, max_deg=2):
    if dim is None:
        dim = draw(st.integers(1, 4))
    maps = tuple(draw(param_polys(dim, max_deg)) for _ in range(4))
    box = []
    for _ in range(dim):
        a = draw(st.sampled_from(_bound_starts))
        width = draw(st.sampled_from(_bound_widths))
        box.append((a, a + width))
    return ParamSurface(dim, maps, tuple(box))


@st.composite
def densities(draw, n_fields=1):
    nvars = 5 * n_fields
    total = Poly.zero(nvars)
    for _ in range(draw(st.integers(0, 3))):
        mono = Poly.const(draw(rationals), nvars)
        for axis in draw(st.lists(st.integers(0, nvars - 1), max_size=2)):
            mono = mono * Poly.variable(axis, nvars)
        total = total + mono
    return LagrangianSpec(n_fields, total)


def field_sets(n_fields=1):
    return st.builds(
        lambda polys: FieldSet(tuple(polys)),
        st.lists(small_polys, min_size=n_fields, max_size=n_fields),
    )
