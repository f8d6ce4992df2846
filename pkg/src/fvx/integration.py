"""Exact integrals of forms over polynomial surfaces, and the flux identities.

A surface is a polynomial map from a rational parameter box into the patch.
Pulling a form back along such a map gives a polynomial in the parameters,
so every integral here is an exact rational number and every Stokes-type
identity is a decidable equality.

Two integral types coexist:

* ``integrate_m``    -- rank equals dimension; tangent vectors enter through
  their coordinate parts only, so label-5 components of the form are ignored.
* ``integrate_deg``  -- rank exceeds dimension by one; the tangent frame is
  completed with the distinguished vector **1**, so only label-5 components
  of the form survive.

Boundaries are the oriented faces of the parameter box with the outward
convention: fixing parameter k (0-based) at its upper end carries sign
(-1)^k, the lower end the opposite.  The Stokes checks validate the
convention rather than assuming it.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from fvx.calculus import bd, bdstar, d5
from fvx.forms_core import (
    COORD_AXES,
    FiveForm,
    MultiVector,
    wedge,
    z_part,
)
from fvx.polyfield import Poly, RationalLike, integrate_box

Interval = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class ParamSurface:
    """Polynomial map from a rational box into the patch.

    ``dim`` may be 0 (a point, used for the faces of curves); public surfaces
    have dim 1..4.  Map components are polynomials in the parameters.
    """

    dim: int
    map: tuple[Poly, Poly, Poly, Poly]
    box: tuple[Interval, ...]

    def __post_init__(self):
        if not 0 <= self.dim <= 4:
            raise ValueError("surface dimension must be between 0 and 4")
        object.__setattr__(self, "map", tuple(self.map))
        if len(self.map) != 4:
            raise ValueError("surface map needs exactly four components")
        for comp in self.map:
            if not isinstance(comp, Poly) or comp.nvars != self.dim:
                raise ValueError("map components must be polynomials in the parameters")
        box = tuple((Fraction(a), Fraction(b)) for a, b in self.box)
        object.__setattr__(self, "box", box)
        if len(box) != self.dim:
            raise ValueError("box needs one interval per parameter")
        for a, b in box:
            if not a < b:
                raise ValueError("box intervals must satisfy a < b")

    def image_point(self, lam: Sequence[RationalLike]) -> tuple[Fraction, ...]:
        return tuple(comp.evaluate(lam) for comp in self.map)


@dataclass(frozen=True)
class TangentFrame:
    """Evaluated tangent vectors, with label-5 components set to the
    parameter values themselves."""

    vectors: tuple[MultiVector, ...]
    point: tuple[Fraction, ...]

    @property
    def z_matrix(self) -> list[list[Fraction]]:
        return [
            [vec.coeff((axis,)).as_fraction() for axis in COORD_AXES]
            for vec in self.vectors
        ]

    @property
    def is_degenerate(self) -> bool:
        return _matrix_rank(self.z_matrix) < len(self.vectors)


@dataclass(frozen=True)
class OrientedFace:
    """One face of the parameter box, with its induced orientation sign."""

    parent: ParamSurface
    fixed: int
    end: str

    def __post_init__(self):
        if not 0 <= self.fixed < self.parent.dim:
            raise ValueError("fixed parameter index out of range")
        if self.end not in ("low", "high"):
            raise ValueError("end must be 'low' or 'high'")

    @property
    def sign(self) -> int:
        outward = (-1) ** self.fixed
        return outward if self.end == "high" else -outward

    def surface(self) -> ParamSurface:
        parent = self.parent
        value = parent.box[self.fixed][0 if self.end == "low" else 1]
        n = parent.dim - 1
        subs: list[Poly] = []
        for k in range(parent.dim):
            if k < self.fixed:
                subs.append(Poly.variable(k, n))
            elif k == self.fixed:
                subs.append(Poly.const(value, n))
            else:
                subs.append(Poly.variable(k - 1, n))
        new_map = tuple(comp.compose(subs) for comp in parent.map)
        new_box = parent.box[: self.fixed] + parent.box[self.fixed + 1 :]
        return ParamSurface(n, new_map, new_box)


def faces(V: ParamSurface) -> list[OrientedFace]:
    if V.dim < 1:
        raise ValueError("a point has no boundary faces")
    return [
        OrientedFace(V, k, end)
        for k in range(V.dim)
        for end in ("low", "high")
    ]


# -- exact linear algebra over the rationals -----------------------------------


def _matrix_rank(rows: list[list[Fraction]]) -> int:
    work = [list(map(Fraction, row)) for row in rows]
    rank = 0
    cols = len(work[0]) if work else 0
    for col in range(cols):
        pivot = next((r for r in range(rank, len(work)) if work[r][col]), None)
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        lead = work[rank][col]
        for r in range(len(work)):
            if r != rank and work[r][col]:
                factor = work[r][col] / lead
                work[r] = [x - factor * y for x, y in zip(work[r], work[rank])]
        rank += 1
    return rank


def _det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    work = [list(map(Fraction, row)) for row in rows]
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col]), None)
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            work[col], work[pivot] = work[pivot], work[col]
            det = -det
        det *= work[col][col]
        for r in range(col + 1, n):
            factor = work[r][col] / work[col][col]
            work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return det


def _solve_matrix(A: list[list[Fraction]], B: list[list[Fraction]]):
    """Solve A X = B exactly for square A; None when A is singular."""
    n = len(A)
    width = len(B[0]) if B else 0
    work = [list(map(Fraction, A[r])) + list(map(Fraction, B[r])) for r in range(n)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if work[r][col]), None)
        if pivot is None:
            return None
        work[col], work[pivot] = work[pivot], work[col]
        lead = work[col][col]
        work[col] = [x / lead for x in work[col]]
        for r in range(n):
            if r != col and work[r][col]:
                factor = work[r][col]
                work[r] = [x - factor * y for x, y in zip(work[r], work[col])]
    return [row[n : n + width] for row in work]


def _mat_mul(A, B):
    return [
        [sum((A[r][k] * B[k][c] for k in range(len(B))), Fraction(0)) for c in range(len(B[0]))]
        for r in range(len(A))
    ]


def _poly_det(rows: list[list[Poly]], nvars: int) -> Poly:
    n = len(rows)
    if n == 0:
        return Poly.const(1, nvars)
    total = Poly.zero(nvars)
    for perm in itertools.permutations(range(n)):
        sign = 1
        for i in range(n):
            for j in range(i + 1, n):
                if perm[i] > perm[j]:
                    sign = -sign
        term = Poly.const(sign, nvars)
        for i in range(n):
            term = term * rows[i][perm[i]]
        total = total + term
    return total


# -- tangent frames and surface equivalence ------------------------------------


def _check_in_box(V: ParamSurface, lam: Sequence[RationalLike]) -> tuple[Fraction, ...]:
    lam = tuple(Fraction(v) for v in lam)
    if len(lam) != V.dim:
        raise ValueError("parameter point has wrong dimension")
    for value, (a, b) in zip(lam, V.box):
        if not a <= value <= b:
            raise ValueError("point outside parameter box")
    return lam


def _jacobian(V: ParamSurface) -> list[list[Poly]]:
    return [[V.map[axis].partial(k) for k in range(V.dim)] for axis in COORD_AXES]


def tangent_frame(V: ParamSurface, lam: Sequence[RationalLike]) -> TangentFrame:
    """Evaluate the tangent vectors at a parameter point.

    The coordinate parts are the Jacobian columns; the label-5 part of the
    k-th vector is the k-th parameter value.
    """
    lam = _check_in_box(V, lam)
    J = _jacobian(V)
    vectors = []
    for k in range(V.dim):
        comps: dict[tuple, Poly] = {}
        for axis in COORD_AXES:
            value = J[axis][k].evaluate(lam)
            if value:
                comps[(axis,)] = Poly.const(value, 4)
        if lam[k]:
            comps[(5,)] = Poly.const(lam[k], 4)
        vectors.append(MultiVector(1, comps))
    return TangentFrame(tuple(vectors), lam)


def surface_multivector(V: ParamSurface, lam: Sequence[RationalLike]) -> MultiVector:
    """Wedge of the coordinate parts of the tangent frame.

    Zero exactly when the frame is degenerate, so a zero result is the
    degeneracy flag.
    """
    frame = tangent_frame(V, lam)
    w = MultiVector.from_scalar(1)
    for vec in frame.vectors:
        w = wedge(w, z_part(vec))
    return w


RELATIONS = ("1", "1u", "2", "3")


def equivalence_check(
    a: ParamSurface,
    b: ParamSurface,
    lam_a: Sequence[RationalLike],
    lam_b: Sequence[RationalLike],
    relation: str,
) -> bool:
    """Pointwise equivalence of two parametrizations.

    Relation "1": some positive-determinant matrix carries b's coordinate
    frame to a's.  "1u": that matrix is unimodular (equivalently the surface
    multivectors coincide).  "2": the coordinate frames are equal.  "3":
    relation "2" and the parameter values agree as well.
    """
    if relation not in RELATIONS:
        raise ValueError(f"unknown relation {relation!r}")
    if a.dim != b.dim:
        raise ValueError("surfaces of different dimension")
    frame_a = tangent_frame(a, lam_a)
    frame_b = tangent_frame(b, lam_b)
    if a.image_point(frame_a.point) != b.image_point(frame_b.point):
        raise ValueError("tangent frames taken at different image points")
    if frame_a.is_degenerate or frame_b.is_degenerate:
        raise ValueError("degenerate tangent frame")

    if relation in ("2", "3"):
        same_frames = frame_a.z_matrix == frame_b.z_matrix
        if relation == "2":
            return same_frames
        return same_frames and frame_a.point == frame_b.point

    m = a.dim
    # Columns of A/B are the coordinate parts of the tangent vectors.
    A = [[frame_a.z_matrix[k][axis] for k in range(m)] for axis in range(4)]
    B = [[frame_b.z_matrix[k][axis] for k in range(m)] for axis in range(4)]
    Bt = [[B[r][c] for r in range(4)] for c in range(m)]
    gram = _mat_mul(Bt, B)
    rhs = _mat_mul(Bt, A)
    M = _solve_matrix(gram, rhs)
    if M is None or _mat_mul(B, M) != A:
        return False
    det = _det(M)
    if relation == "1":
        return det > 0
    return det == 1


# -- the two integral types ------------------------------------------------------


def integrate_m(form: FiveForm, V: ParamSurface) -> Fraction:
    """Integral of a rank-m form over an m-surface; label-5 components drop."""
    if not isinstance(form, FiveForm):
        raise TypeError("integrate_m expects a FiveForm")
    if form.rank != V.dim:
        raise ValueError("rank must equal surface dimension")
    J = _jacobian(V)
    total = Poly.zero(V.dim)
    for key, coeff in form.coeffs.items():
        if 5 in key:
            continue
        rows = [J[axis] for axis in key]
        minor = _poly_det(rows, V.dim)
        if minor.is_zero:
            continue
        total = total + coeff.compose(list(V.map)) * minor
    return integrate_box(total, V.box)


def integrate_deg(form: FiveForm, V: ParamSurface) -> Fraction:
    """Integral of a rank-(m+1) form over an m-surface with the frame
    completed by **1**; only label-5 components contribute."""
    if not isinstance(form, FiveForm):
        raise TypeError("integrate_deg expects a FiveForm")
    if form.rank != V.dim + 1:
        raise ValueError("rank must exceed surface dimension by one")
    J = _jacobian(V)
    total = Poly.zero(V.dim)
    for key, coeff in form.coeffs.items():
        if key[-1] != 5:
            continue
        rows = [J[axis] for axis in key[:-1]]
        minor = _poly_det(rows, V.dim)
        if minor.is_zero:
            continue
        total = total + coeff.compose(list(V.map)) * minor
    return integrate_box(total, V.box)


def integrate_full_frame(form: FiveForm, V: ParamSurface) -> Fraction:
    """Contraction with the bare tangent frame, no completion by **1**.

    The label-5 row of the frame is the parameter value itself, so this
    number depends on the parametrization; it exists to demonstrate that
    dependence, not to define an invariant.
    """
    if not isinstance(form, FiveForm):
        raise TypeError("integrate_full_frame expects a FiveForm")
    if form.rank != V.dim:
        raise ValueError("rank must equal surface dimension")
    J = _jacobian(V)
    param_row = [Poly.variable(k, V.dim) for k in range(V.dim)]
    total = Poly.zero(V.dim)
    for key, coeff in form.coeffs.items():
        rows = [param_row if axis == 5 else J[axis] for axis in key]
        minor = _poly_det(rows, V.dim)
        if minor.is_zero:
            continue
        total = total + coeff.compose(list(V.map)) * minor
    return integrate_box(total, V.box)


# -- boundary fluxes and the integral identities ----------------------------------


def boundary_flux(form: FiveForm, V: ParamSurface) -> Fraction:
    """Oriented sum of face integrals; the integral type follows the rank."""
    if V.dim < 1:
        raise ValueError("surface has no boundary")
    if form.rank == V.dim - 1:
        integral = integrate_m
    elif form.rank == V.dim:
        integral = integrate_deg
    else:
        raise ValueError("rank incompatible with boundary flux")
    total = Fraction(0)
    for face in faces(V):
        total += face.sign * integral(form, face.surface())
    return total


STOKES_VARIANTS = ("rank_eq_dim_plus", "rank_eq_dim")


def stokes_check(form: FiveForm, V: ParamSurface, variant: str) -> bool:
    """Boundary integral versus volume integral of the derivative, exactly.

    ``rank_eq_dim_plus``: the surface dimension exceeds the rank by one and
    both sides are plain integrals.  ``rank_eq_dim``: rank equals dimension
    and both sides are frame-completed integrals.
    """
    if variant == "rank_eq_dim_plus":
        if form.rank + 1 != V.dim:
            raise ValueError("variant needs rank + 1 = dim")
        return boundary_flux(form, V) == integrate_m(d5(form), V)
    if variant == "rank_eq_dim":
        if form.rank != V.dim:
            raise ValueError("variant needs rank = dim")
        return boundary_flux(form, V) == integrate_deg(d5(form), V)
    raise ValueError(f"unknown variant {variant!r}")


def five_flux(form: FiveForm, V: ParamSurface) -> Fraction:
    """Boundary flux plus signed volume term; equals the integral of bd(form)."""
    if form.rank != V.dim:
        raise ValueError("rank must equal surface dimension")
    return boundary_flux(form, V) + (-1) ** form.rank * integrate_m(form, V)


BY_PARTS_FLAVORS = ("d5", "bd_left", "bdstar_left")


def by_parts_check(s: FiveForm, t: FiveForm, V: ParamSurface, flavor: str) -> bool:
    """Integration by parts, each integral computed independently.

    ``d5``: plain derivative, surface dimension rank(s)+rank(t)+1.
    ``bd_left`` / ``bdstar_left``: five-vector derivative on the left factor
    and its reflection on the right (or swapped), dimension rank(s)+rank(t).
    """
    m = s.rank
    if flavor == "d5":
        if s.rank + t.rank + 1 != V.dim:
            raise ValueError("flavor needs rank(s) + rank(t) + 1 = dim")
        lhs = integrate_m(wedge(d5(s), t), V)
        rhs = boundary_flux(wedge(s, t), V) - (-1) ** m * integrate_m(wedge(s, d5(t)), V)
        return lhs == rhs
    if flavor == "bd_left":
        first, second = bd, bdstar
    elif flavor == "bdstar_left":
        first, second = bdstar, bd
    else:
        raise ValueError(f"unknown flavor {flavor!r}")
    if s.rank + t.rank != V.dim:
        raise ValueError("flavor needs rank(s) + rank(t) = dim")
    lhs = integrate_deg(wedge(first(s), t), V)
    rhs = boundary_flux(wedge(s, t), V) - (-1) ** m * integrate_deg(wedge(s, second(t)), V)
    return lhs == rhs


def reparametrized(V: ParamSurface, new_box: Sequence[Sequence[RationalLike]]) -> ParamSurface:
    """Same surface over a different box via increasing affine changes."""
    new_box = tuple((Fraction(a), Fraction(b)) for a, b in new_box)
    if len(new_box) != V.dim:
        raise ValueError("box needs one interval per parameter")
    subs: list[Poly] = []
    for k, ((a, b), (c, d)) in enumerate(zip(V.box, new_box)):
        if not c < d:
            raise ValueError("box intervals must satisfy a < b")
        scale = (b - a) / (d - c)
        shift = a - scale * c
        subs.append(scale * Poly.variable(k, V.dim) + Poly.const(shift, V.dim))
    new_map = tuple(comp.compose(subs) for comp in V.map)
    return ParamSurface(V.dim, new_map, new_box)
