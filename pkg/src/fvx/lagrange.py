"""Euler-Lagrange machinery for N scalar fields, in three formulations.

A Lagrangian density is an autonomous polynomial in 5N formal variables:
for field l, the variables p{l}_0..p{l}_3 stand for the coordinate
derivatives of the field and p{l}_5 stands for the field itself (the label-5
directional derivative of a scalar is the scalar).  Substituting a concrete
polynomial field turns every expression below into an exact polynomial in
the coordinates.

The three formulations checked against each other:

* the scalar residual of the field equation (divergence of the momenta
  minus the p5-derivative);
* the exterior equation d4(J) = K between the current 3-form and the source
  4-form;
* the closedness bd(Lambda) = 0 of the rank-4 form whose plain block holds
  minus the p5-derivative and whose label-5 block holds the current.

The top component of bd(Lambda) is literally the residual, which is the
content of the agreement theorems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from fvx.calculus import bd, bdstar, d4
from fvx.forms_core import FiveForm, FourForm, e_part, permutation_sign, z_part
from fvx.integration import ParamSurface, five_flux
from fvx.polyfield import Poly

P_LABELS = (0, 1, 2, 3, 5)


def p_index(ell: int, label: int) -> int:
    """Flat variable index of p{ell}_{label} in the density's variable list."""
    if label not in P_LABELS:
        raise ValueError(f"no basis label {label}")
    return 5 * ell + (4 if label == 5 else label)


def lagrangian_names(n_fields: int) -> tuple[str, ...]:
    return tuple(f"p{ell}_{label}" for ell in range(n_fields) for label in P_LABELS)


@dataclass(frozen=True)
class LagrangianSpec:
    """Autonomous density polynomial over the 5N formal field variables."""

    n_fields: int
    density: Poly

    def __post_init__(self):
        if self.n_fields < 1:
            raise ValueError("need at least one field")
        if self.density.nvars != 5 * self.n_fields:
            raise ValueError("density must use exactly five variables per field")

    def __add__(self, other: "LagrangianSpec") -> "LagrangianSpec":
        if other.n_fields != self.n_fields:
            raise ValueError("field counts differ")
        return LagrangianSpec(self.n_fields, self.density + other.density)


@dataclass(frozen=True)
class FieldSet:
    """Concrete polynomial fields on the patch."""

    fields: tuple[Poly, ...]

    def __post_init__(self):
        object.__setattr__(self, "fields", tuple(self.fields))
        if not self.fields:
            raise ValueError("need at least one field")
        for phi in self.fields:
            if not isinstance(phi, Poly) or phi.nvars != 4:
                raise ValueError("fields must be polynomials in the four coordinates")

    def __len__(self) -> int:
        return len(self.fields)


def _substitution_maps(L: LagrangianSpec, phi: FieldSet) -> list[Poly]:
    if len(phi) != L.n_fields:
        raise ValueError("field count does not match the density")
    maps: list[Poly] = []
    for field in phi.fields:
        maps.extend(field.partial(mu) for mu in range(4))
        maps.append(field)
    return maps


def substitute(L: LagrangianSpec, phi: FieldSet, expr: Poly | None = None) -> Poly:
    """Replace the formal variables by the fields and their derivatives."""
    expr = L.density if expr is None else expr
    return expr.compose(_substitution_maps(L, phi))


def _check_index(L: LagrangianSpec, ell: int) -> None:
    if not 0 <= ell < L.n_fields:
        raise ValueError("field index out of range")


def el_residual(L: LagrangianSpec, phi: FieldSet, ell: int) -> Poly:
    """Field-equation residual: div of momenta minus the p5-derivative."""
    _check_index(L, ell)
    total = Poly.zero(4)
    for mu in range(4):
        momentum = substitute(L, phi, L.density.partial(p_index(ell, mu)))
        total = total + momentum.partial(mu)
    return total - substitute(L, phi, L.density.partial(p_index(ell, 5)))


def J_form(L: LagrangianSpec, phi: FieldSet, ell: int) -> FourForm:
    """Current 3-form: the momentum for the missing coordinate, with the
    sign of inserting it in front."""
    _check_index(L, ell)
    out = {}
    for missing in range(4):
        key = tuple(a for a in range(4) if a != missing)
        momentum = substitute(L, phi, L.density.partial(p_index(ell, missing)))
        if momentum.is_zero:
            continue
        out[key] = permutation_sign((missing,) + key) * momentum
    return FourForm(3, out)


def K_form(L: LagrangianSpec, phi: FieldSet, ell: int) -> FourForm:
    """Source 4-form: the p5-derivative of the density on the volume key."""
    _check_index(L, ell)
    return FourForm(4, {(0, 1, 2, 3): substitute(L, phi, L.density.partial(p_index(ell, 5)))})


def check_51(L: LagrangianSpec, phi: FieldSet, ell: int) -> bool:
    return d4(J_form(L, phi, ell)) == K_form(L, phi, ell)


def Lambda_form(L: LagrangianSpec, phi: FieldSet, ell: int) -> FiveForm:
    """Rank-4 form whose closedness under bd is the field equation.

    Plain block: minus the p5-derivative on (0,1,2,3).  Label-5 block: the
    current components with the label-5 slot appended.
    """
    _check_index(L, ell)
    out: dict[tuple, Poly] = {}
    source = substitute(L, phi, L.density.partial(p_index(ell, 5)))
    if not source.is_zero:
        out[(0, 1, 2, 3)] = -source
    for key, comp in J_form(L, phi, ell).coeffs.items():
        out[key + (5,)] = comp
    return FiveForm(4, out)


def Lambda_star_form(L: LagrangianSpec, phi: FieldSet, ell: int) -> FiveForm:
    """Same form with the plain block negated; closed under bdstar instead."""
    lam = Lambda_form(L, phi, ell)
    return e_part(lam) - z_part(lam)


def check_55(L: LagrangianSpec, phi: FieldSet, ell: int) -> bool:
    """Closedness of Lambda under bd, cross-checked against the reflected
    route on the sign-flipped form; the two can never disagree."""
    route_bd = bd(Lambda_form(L, phi, ell)).is_zero
    route_bdstar = bdstar(Lambda_star_form(L, phi, ell)).is_zero
    if route_bd != route_bdstar:
        raise RuntimeError("bd and bdstar routes disagree")
    return route_bd


def check_57(L: LagrangianSpec, phi: FieldSet, ell: int, V: ParamSurface) -> bool:
    """Vanishing five-vector flux of Lambda through a 4-dimensional probe."""
    if V.dim != 4:
        raise ValueError("probe surface must be four-dimensional")
    return five_flux(Lambda_form(L, phi, ell), V) == 0


def unit_probe_box() -> ParamSurface:
    """Identity embedding of the unit 4-cube."""
    maps = tuple(Poly.variable(k, 4) for k in range(4))
    return ParamSurface(4, maps, ((0, 1),) * 4)


@dataclass(frozen=True)
class ELReport:
    """Everything the three formulations produce for one (L, phi) pair."""

    residuals: tuple[Poly, ...]
    j_forms: tuple[FourForm, ...]
    k_forms: tuple[FourForm, ...]
    lambda_forms: tuple[FiveForm, ...]
    flux_values: tuple[Fraction, ...]

    @property
    def is_solution(self) -> bool:
        return all(r.is_zero for r in self.residuals)


def el_report(L: LagrangianSpec, phi: FieldSet, V: ParamSurface | None = None) -> ELReport:
    if V is None:
        V = unit_probe_box()
    indices = range(L.n_fields)
    return ELReport(
        residuals=tuple(el_residual(L, phi, ell) for ell in indices),
        j_forms=tuple(J_form(L, phi, ell) for ell in indices),
        k_forms=tuple(K_form(L, phi, ell) for ell in indices),
        lambda_forms=tuple(Lambda_form(L, phi, ell) for ell in indices),
        flux_values=tuple(five_flux(Lambda_form(L, phi, ell), V) for ell in indices),
    )
