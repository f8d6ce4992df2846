"""Seeded randomized identity suites behind the command-line checker.

Every identity draws exact random instances (rational coefficients with
numerator and denominator bounded by 9) from a per-suite deterministic
stream, evaluates an exact equality, and on failure greedily drops
monomials from the instance while the failure persists before serializing
it.  All operator references go through their defining modules so that a
patched (mutated) operator is exercised everywhere.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Mapping, Sequence

from fvx import calculus as ca
from fvx import forms_core as fc
from fvx import integration as ig
from fvx import io as fio
from fvx import lagrange as lg
from fvx import metric_dual as md
from fvx.forms_core import FIVE_AXES, FiveForm, FourForm, IndexedArray, MultiVector
from fvx.integration import ParamSurface
from fvx.lagrange import FieldSet, LagrangianSpec
from fvx.metric_dual import DEFAULT_CFG, MetricConfig
from fvx.polyfield import COORD_NAMES, Poly, default_names, format_poly

SUITE_NAMES = ("algebra", "calculus", "stokes", "flux", "duality", "lagrange", "appendix")


@dataclass(frozen=True)
class SuiteConfig:
    seed: int = 0
    trials: int = 25
    max_degree: int = 3
    metric: MetricConfig = DEFAULT_CFG
    suites: tuple[str, ...] = SUITE_NAMES

    def __post_init__(self):
        object.__setattr__(self, "suites", tuple(self.suites))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.max_degree < 1:
            raise ValueError("max degree must be at least 1")
        if not self.suites:
            raise ValueError("no suites selected")
        for name in self.suites:
            if name not in SUITE_NAMES:
                raise ValueError(f"unknown suite {name!r}")


@dataclass(frozen=True)
class InstanceRecord:
    suite: str
    identity: str
    index: int
    passed: bool
    counterexample: str | None = None


@dataclass(frozen=True)
class Report:
    records: tuple[InstanceRecord, ...]

    @property
    def failures(self) -> tuple[InstanceRecord, ...]:
        return tuple(r for r in self.records if not r.passed)

    @property
    def passed(self) -> bool:
        return not self.failures


# -- deterministic instance generation ----------------------------------------------


def rand_fraction(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-9, 9), rng.randint(1, 9))


def rand_poly(rng: random.Random, nvars: int, max_degree: int, max_terms: int = 3) -> Poly:
    terms: dict[tuple[int, ...], Fraction] = {}
    for _ in range(rng.randint(0, max_terms)):
        expo = [0] * nvars
        for _ in range(rng.randint(0, max_degree)):
            if nvars:
                expo[rng.randrange(nvars)] += 1
        terms[tuple(expo)] = rand_fraction(rng)
    return Poly(nvars, terms)


def rand_form(
    rng: random.Random,
    rank: int,
    max_degree: int,
    cls=FiveForm,
    axes: Sequence[int] = FIVE_AXES,
) -> FiveForm:
    keys = list(itertools.combinations(axes, rank))
    chosen = rng.sample(keys, min(len(keys), rng.randint(1, 3)))
    return cls(rank, {k: rand_poly(rng, 4, max_degree) for k in chosen})


def rand_vector(rng: random.Random, max_degree: int) -> MultiVector:
    return rand_form(rng, 1, max_degree, cls=MultiVector)


_BOX_STARTS = (Fraction(0), Fraction(-1, 2), Fraction(1, 3))
_BOX_WIDTHS = (Fraction(1), Fraction(1, 2), Fraction(2))


def rand_box(rng: random.Random, dim: int) -> tuple[tuple[Fraction, Fraction], ...]:
    box = []
    for _ in range(dim):
        a = rng.choice(_BOX_STARTS)
        box.append((a, a + rng.choice(_BOX_WIDTHS)))
    return tuple(box)


def rand_surface(rng: random.Random, dim: int, max_degree: int) -> ParamSurface:
    deg = min(2, max_degree)
    maps = [rand_poly(rng, dim, deg, max_terms=2) for _ in range(4)]
    # Pin a shuffled coordinate block to the parameters so the patch is an
    # immersion; fully random sparse maps make most tangent minors vanish.
    axes = rng.sample(range(4), dim)
    for k in range(dim):
        maps[axes[k]] = maps[axes[k]] + Poly.variable(k, dim)
    return ParamSurface(dim, tuple(maps), rand_box(rng, dim))


def rand_lagrangian(rng: random.Random, n_fields: int, max_degree: int) -> LagrangianSpec:
    return LagrangianSpec(
        n_fields, rand_poly(rng, 5 * n_fields, min(3, max_degree), max_terms=3)
    )


def rand_fields(rng: random.Random, n_fields: int, max_degree: int) -> FieldSet:
    deg = min(2, max_degree)
    return FieldSet(tuple(rand_poly(rng, 4, deg, max_terms=2) for _ in range(n_fields)))


# -- counterexample serialization and shrinking --------------------------------------


def _poly_text(p: Poly) -> str:
    names = COORD_NAMES if p.nvars == 4 else default_names(p.nvars)
    return format_poly(p, names)


def _serialize(value) -> str:
    if isinstance(value, fc._Alternating):
        return json.dumps(fio.form_to_dict(value), sort_keys=True)
    if isinstance(value, Poly):
        return _poly_text(value)
    if isinstance(value, ParamSurface):
        return json.dumps(fio.surface_to_dict(value), sort_keys=True)
    if isinstance(value, LagrangianSpec):
        return json.dumps(fio.lagrangian_to_dict(value), sort_keys=True)
    if isinstance(value, FieldSet):
        return json.dumps(fio.fields_to_list(value))
    if isinstance(value, Fraction):
        return str(value)
    return repr(value)


def describe_instance(inst: Mapping[str, object]) -> str:
    return "; ".join(f"{k}={_serialize(inst[k])}" for k in sorted(inst))


def _poly_without(p: Poly, key: tuple[int, ...]) -> Poly:
    return Poly(p.nvars, {k: c for k, c in p.terms.items() if k != key})


def _value_atoms(value) -> list[tuple]:
    if isinstance(value, Poly):
        return [("poly", k) for k in sorted(value.terms)]
    if isinstance(value, fc._Alternating):
        return [
            ("form", key, term)
            for key in sorted(value.coeffs)
            for term in sorted(value.coeffs[key].terms)
        ]
    if isinstance(value, ParamSurface):
        return [
            ("map", i, term)
            for i in range(4)
            for term in sorted(value.map[i].terms)
        ]
    if isinstance(value, LagrangianSpec):
        return [("density", k) for k in sorted(value.density.terms)]
    if isinstance(value, FieldSet):
        return [
            ("field", i, term)
            for i in range(len(value.fields))
            for term in sorted(value.fields[i].terms)
        ]
    return []


def _value_drop(value, atom):
    kind = atom[0]
    if kind == "poly":
        return _poly_without(value, atom[1])
    if kind == "form":
        _, key, term = atom
        coeffs = dict(value.coeffs)
        coeffs[key] = _poly_without(coeffs[key], term)
        return type(value)(value.rank, coeffs)
    if kind == "map":
        _, i, term = atom
        maps = list(value.map)
        maps[i] = _poly_without(maps[i], term)
        return ParamSurface(value.dim, tuple(maps), value.box)
    if kind == "density":
        return LagrangianSpec(value.n_fields, _poly_without(value.density, atom[1]))
    if kind == "field":
        _, i, term = atom
        fields = list(value.fields)
        fields[i] = _poly_without(fields[i], term)
        return FieldSet(tuple(fields))
    raise AssertionError(f"unknown atom {atom!r}")


def shrink_instance(inst: dict, still_fails: Callable[[dict], bool]) -> dict:
    """Greedily drop monomials from the instance while the failure persists."""
    changed = True
    while changed:
        changed = False
        for slot in sorted(inst):
            for atom in _value_atoms(inst[slot]):
                candidate = dict(inst)
                try:
                    candidate[slot] = _value_drop(inst[slot], atom)
                    bad = still_fails(candidate)
                except Exception:
                    bad = False
                if bad:
                    inst = candidate
                    changed = True
                    break
            if changed:
                break
    return inst


# -- identity registry ----------------------------------------------------------------


@dataclass(frozen=True)
class Identity:
    name: str
    make: Callable[[random.Random, SuiteConfig], dict]
    holds: Callable[[dict, SuiteConfig], bool]


def run_single(ident: Identity, rng: random.Random, cfg: SuiteConfig) -> tuple[bool, str | None]:
    inst = ident.make(rng, cfg)
    try:
        if ident.holds(inst, cfg):
            return True, None
    except Exception as exc:
        return False, f"{describe_instance(inst)} | raised {type(exc).__name__}: {exc}"

    def still_fails(candidate: dict) -> bool:
        return not ident.holds(candidate, cfg)

    return False, describe_instance(shrink_instance(inst, still_fails))


_ONE = FiveForm.from_scalar(1)
_ONE4 = FourForm.from_scalar(1)


def _det_negative(cfg: MetricConfig) -> bool:
    return cfg.g[0] * cfg.g[1] * cfg.g[2] * cfg.g[3] < 0


def _metric_for_dual(cfg: SuiteConfig) -> MetricConfig:
    # The uniform involution constant needs an odd number of minus signs
    # in the coordinate block; fall back to the reference metric otherwise.
    return cfg.metric if _det_negative(cfg.metric) else DEFAULT_CFG


# algebra ------------------------------------------------------------------------


def _make_one_form(rng, cfg):
    return {"t": rand_form(rng, rng.randint(0, 5), cfg.max_degree)}


def _make_nonzero_form(rng, cfg):
    # The unit law on the zero form cannot see a sign error in the product;
    # redraw until something survives.
    for _ in range(40):
        i = _make_one_form(rng, cfg)
        if not i["t"].is_zero:
            break
    return i


def _make_subtop_form(rng, cfg):
    # Identities that wedge the input with another label need rank room.
    return {"t": rand_form(rng, rng.randint(0, 4), cfg.max_degree)}


def _make_wedge_pair(rng, cfg):
    ra = rng.randint(0, 5)
    rb = rng.randint(0, 5 - ra)
    return {
        "s": rand_form(rng, ra, cfg.max_degree),
        "t": rand_form(rng, rb, cfg.max_degree),
    }


def _make_wedge_triple(rng, cfg):
    ra = rng.randint(0, 3)
    rb = rng.randint(0, 3 - ra)
    rc = rng.randint(0, 5 - ra - rb)
    return {
        "s": rand_form(rng, ra, cfg.max_degree),
        "t": rand_form(rng, rb, cfg.max_degree),
        "u": rand_form(rng, rc, cfg.max_degree),
    }


def _holds_wedge_unit(i, cfg):
    t = i["t"]
    return fc.wedge(_ONE, t) == t and fc.wedge(t, _ONE) == t


def _holds_graded_commutativity(i, cfg):
    s, t = i["s"], i["t"]
    sign = (-1) ** (s.rank * t.rank)
    return fc.wedge(s, t) == fc.wedge(t, s) * sign


def _holds_associativity(i, cfg):
    s, t, u = i["s"], i["t"], i["u"]
    return fc.wedge(fc.wedge(s, t), u) == fc.wedge(s, fc.wedge(t, u))


def _holds_block_split(i, cfg):
    t = i["t"]
    return fc.z_part(t) + fc.e_part(t) == t and fc.e_part(fc.z_part(t)).is_zero


def _make_transfer(rng, cfg):
    return {
        "s": rand_form(rng, rng.randint(0, 4), cfg.max_degree, axes=fc.COORD_AXES),
        "t": rand_form(rng, rng.randint(1, 5), cfg.max_degree),
    }


def _holds_transfer(i, cfg):
    s, t = i["s"], i["t"]
    e = fc.e_part(t)
    return fc.s_from_t(fc.t_from_s(s)) == s and fc.t_from_s(fc.s_from_t(e)) == e


ALGEBRA = (
    Identity("wedge-unit", _make_nonzero_form, _holds_wedge_unit),
    Identity("wedge-graded-commutativity", _make_wedge_pair, _holds_graded_commutativity),
    Identity("wedge-associativity", _make_wedge_triple, _holds_associativity),
    Identity("block-split", _make_one_form, _holds_block_split),
    Identity("label-five-transfer", _make_transfer, _holds_transfer),
)


# calculus -----------------------------------------------------------------------


def _make_four_form(rng, cfg):
    return {"t": rand_form(rng, rng.randint(0, 4), cfg.max_degree, cls=FourForm, axes=fc.COORD_AXES)}


def _make_axis(rng, cfg):
    return {"axis": rng.choice(FIVE_AXES)}


def _make_leibniz_pair4(rng, cfg):
    # Room for one more label: the derivative of an (m + n)-form must fit.
    ra = rng.randint(0, 3)
    rb = rng.randint(0, 3 - ra)
    return {
        "s": rand_form(rng, ra, cfg.max_degree, cls=FourForm, axes=fc.COORD_AXES),
        "t": rand_form(rng, rb, cfg.max_degree, cls=FourForm, axes=fc.COORD_AXES),
    }


def _make_leibniz_pair5(rng, cfg):
    ra = rng.randint(0, 4)
    rb = rng.randint(0, 4 - ra)
    return {
        "s": rand_form(rng, ra, cfg.max_degree),
        "t": rand_form(rng, rb, cfg.max_degree),
    }


def _make_potential_source_4(rng, cfg):
    return {"t": rand_form(rng, rng.randint(0, 3), cfg.max_degree, cls=FourForm, axes=fc.COORD_AXES)}


def _make_inexact_source_4(rng, cfg):
    # A closed input gives the roundtrip nothing to recover; redraw until
    # the derivative is visible.
    for _ in range(40):
        i = _make_potential_source_4(rng, cfg)
        if not ca.d4(i["t"]).is_zero:
            break
    return i


def _make_coord_active_form(rng, cfg):
    # Route comparisons through the coordinate derivative need an input the
    # coordinate derivative does not annihilate.
    for _ in range(40):
        i = _make_subtop_form(rng, cfg)
        if not ca.d5(i["t"]).is_zero:
            break
    return i


def _make_potential_source_5(rng, cfg):
    return {"t": rand_form(rng, rng.randint(0, 4), cfg.max_degree)}


def _make_bracket(rng, cfg):
    return {
        "t": rand_form(rng, 1, cfg.max_degree),
        "u": rand_vector(rng, cfg.max_degree),
        "v": rand_vector(rng, cfg.max_degree),
    }


def _holds_d4_nilpotent(i, cfg):
    return ca.d4(ca.d4(i["t"])).is_zero


def _holds_d5_nilpotent(i, cfg):
    return ca.d5(ca.d5(i["t"])).is_zero


def _holds_bd_nilpotent(i, cfg):
    return ca.bd(ca.bd(i["t"])).is_zero


def _holds_bdstar_nilpotent(i, cfg):
    return ca.bdstar(ca.bdstar(i["t"])).is_zero


def _holds_bd_unit(i, cfg):
    return ca.bd(_ONE) == fc.j_form() and ca.bdstar(_ONE) == -fc.j_form()


def _holds_bd_from_d5(i, cfg):
    t = i["t"]
    return ca.bd(t) == ca.d5(t) + fc.wedge(fc.j_form(), t)


def _holds_bdstar_from_d5(i, cfg):
    t = i["t"]
    return ca.bdstar(t) == ca.d5(t) - fc.wedge(fc.j_form(), t)


def _holds_reflection_gap(i, cfg):
    t = i["t"]
    return ca.bd(t) - ca.bdstar(t) == fc.wedge(fc.j_form(), t) * 2


def _holds_basis_derivative(i, cfg):
    axis = i["axis"]
    o_axis = fc.basis_one_form(axis)
    if ca.bd(o_axis) != fc.wedge(fc.j_form(), o_axis):
        return False
    if axis == 5:
        return ca.bd(_ONE) == o_axis
    x = Poly.variable(axis, 4)
    return ca.bd(_ONE * x) - ca.bd(_ONE) * x == o_axis


def _holds_leibniz_d4(i, cfg):
    s, t = i["s"], i["t"]
    sign = (-1) ** s.rank
    return ca.d4(fc.wedge(s, t)) == fc.wedge(ca.d4(s), t) + fc.wedge(s, ca.d4(t)) * sign


def _holds_leibniz_d5(i, cfg):
    s, t = i["s"], i["t"]
    sign = (-1) ** s.rank
    return ca.d5(fc.wedge(s, t)) == fc.wedge(ca.d5(s), t) + fc.wedge(s, ca.d5(t)) * sign


def _holds_leibniz_bd(i, cfg):
    s, t = i["s"], i["t"]
    sign = (-1) ** s.rank
    expected = (
        fc.wedge(ca.bd(s), t)
        + fc.wedge(s, ca.bd(t)) * sign
        - fc.wedge(fc.j_form(), fc.wedge(s, t))
    )
    return ca.bd(fc.wedge(s, t)) == expected


def _holds_leibniz_mixed(i, cfg):
    s, t = i["s"], i["t"]
    sign = (-1) ** s.rank
    lhs = ca.d5(fc.wedge(s, t))
    first = fc.wedge(ca.bd(s), t) + fc.wedge(s, ca.bdstar(t)) * sign
    second = fc.wedge(ca.bdstar(s), t) + fc.wedge(s, ca.bd(t)) * sign
    return lhs == first and lhs == second


def _holds_potential_d4(i, cfg):
    s = ca.d4(i["t"])
    return ca.d4(ca.poincare_potential_4(s)) == s


def _holds_potential_d5(i, cfg):
    s = ca.d5(i["t"])
    return ca.d5(ca.poincare_potential_5(s)) == s


def _holds_potential_bd(i, cfg):
    s = ca.bd(i["t"])
    return ca.bd(ca.poincare_potential_bd(s)) == s


def _holds_bracket(i, cfg):
    return ca.bracket_check(i["t"], i["u"], i["v"])


CALCULUS = (
    Identity("d4-nilpotent", _make_four_form, _holds_d4_nilpotent),
    Identity("d5-nilpotent", _make_one_form, _holds_d5_nilpotent),
    Identity("bd-nilpotent", _make_one_form, _holds_bd_nilpotent),
    Identity("bdstar-nilpotent", _make_one_form, _holds_bdstar_nilpotent),
    Identity("bd-unit", _make_axis, _holds_bd_unit),
    Identity("bd-from-d5", _make_coord_active_form, _holds_bd_from_d5),
    Identity("bdstar-from-d5", _make_coord_active_form, _holds_bdstar_from_d5),
    Identity("reflection-gap", _make_subtop_form, _holds_reflection_gap),
    Identity("basis-derivative", _make_axis, _holds_basis_derivative),
    Identity("leibniz-d4", _make_leibniz_pair4, _holds_leibniz_d4),
    Identity("leibniz-d5", _make_leibniz_pair5, _holds_leibniz_d5),
    Identity("leibniz-bd", _make_leibniz_pair5, _holds_leibniz_bd),
    Identity("leibniz-mixed", _make_leibniz_pair5, _holds_leibniz_mixed),
    Identity("potential-d4", _make_inexact_source_4, _holds_potential_d4),
    Identity("potential-d5", _make_potential_source_5, _holds_potential_d5),
    Identity("potential-bd", _make_potential_source_5, _holds_potential_bd),
    Identity("bracket-pairing", _make_bracket, _holds_bracket),
)


# stokes -------------------------------------------------------------------------


def _make_stokes_plain(rng, cfg):
    dim = rng.randint(1, 4)
    return {
        "t": rand_form(rng, dim - 1, cfg.max_degree),
        "V": rand_surface(rng, dim, cfg.max_degree),
    }


def _make_stokes_five(rng, cfg):
    dim = rng.randint(1, 4)
    return {
        "t": rand_form(rng, dim, cfg.max_degree),
        "V": rand_surface(rng, dim, cfg.max_degree),
    }


def _make_four_vector_stokes(rng, cfg):
    dim = rng.randint(1, 4)
    return {
        "S": rand_form(rng, dim - 1, cfg.max_degree, cls=FourForm, axes=fc.COORD_AXES),
        "V": rand_surface(rng, dim, cfg.max_degree),
    }


def _make_reparam(rng, cfg):
    dim = rng.randint(1, 4)
    return {
        "t": rand_form(rng, dim, cfg.max_degree),
        "V": rand_surface(rng, dim, cfg.max_degree),
        "target": rand_surface(rng, dim, cfg.max_degree),
    }


def _holds_stokes_plain(i, cfg):
    return ig.stokes_check(i["t"], i["V"], "rank_eq_dim_plus")


def _holds_stokes_five(i, cfg):
    return ig.stokes_check(i["t"], i["V"], "rank_eq_dim")


def _holds_four_vector_stokes(i, cfg):
    S, V = i["S"], i["V"]
    boundary = Fraction(0)
    if V.dim >= 1:
        for face in ig.faces(V):
            boundary += face.sign * ig.integrate_m(fc.lift(S), face.surface())
    return boundary == ig.integrate_m(fc.lift(ca.d4(S)), V)


def _holds_reparam(i, cfg):
    t, V = i["t"], i["V"]
    stretched = ig.reparametrized(V, i["target"].box)
    return ig.integrate_m(t, V) == ig.integrate_m(t, stretched)


STOKES = (
    Identity("boundary-interior-plain", _make_stokes_plain, _holds_stokes_plain),
    Identity("boundary-interior-five", _make_stokes_five, _holds_stokes_five),
    Identity("four-vector-stokes", _make_four_vector_stokes, _holds_four_vector_stokes),
    Identity("reparametrization-invariance", _make_reparam, _holds_reparam),
)


# flux ---------------------------------------------------------------------------


def _make_flux(rng, cfg):
    # A zero interior term or zero total satisfies the route comparison for
    # the wrong reasons; redraw so both routes meet on nonzero numbers.
    for _ in range(40):
        dim = rng.randint(1, 4)
        t = rand_form(rng, dim, cfg.max_degree)
        V = rand_surface(rng, dim, cfg.max_degree)
        if ig.integrate_m(t, V) != 0 and ig.five_flux(t, V) != 0:
            break
    return {"t": t, "V": V}


def _make_by_parts(shift: int):
    def make(rng, cfg):
        dim = rng.randint(1, 4)
        m = rng.randint(0, dim - shift)
        n = dim - shift - m
        return {
            "s": rand_form(rng, m, cfg.max_degree),
            "t": rand_form(rng, n, cfg.max_degree),
            "V": rand_surface(rng, dim, cfg.max_degree),
        }

    return make


def _holds_flux_routes(i, cfg):
    t, V = i["t"], i["V"]
    return ig.five_flux(t, V) == ig.integrate_deg(ca.bd(t), V)


def _holds_by_parts(flavor: str):
    def holds(i, cfg):
        return ig.by_parts_check(i["s"], i["t"], i["V"], flavor)

    return holds


FLUX = (
    Identity("five-flux-routes", _make_flux, _holds_flux_routes),
    Identity("by-parts-d5", _make_by_parts(1), _holds_by_parts("d5")),
    Identity("by-parts-bd-left", _make_by_parts(0), _holds_by_parts("bd_left")),
    Identity("by-parts-bdstar-left", _make_by_parts(0), _holds_by_parts("bdstar_left")),
)


# duality ------------------------------------------------------------------------


def _make_epsilon_key(rng, cfg):
    labels = [rng.choice(FIVE_AXES) for _ in range(5)]
    if rng.random() < 0.7:
        labels = rng.sample(FIVE_AXES, 5)
    return {"key": tuple(labels)}


def _holds_epsilon_reference(i, cfg):
    key = i["key"]
    eps = md.epsilon_lower(DEFAULT_CFG)
    if eps.values[(0, 1, 2, 3, 5)] != 1:
        return False
    return eps.values[key] == fc.permutation_sign(key)


def _make_contraction(rng, cfg):
    m = rng.randint(0, 5)
    upper = tuple(rng.sample(FIVE_AXES, m))
    if m >= 2 and rng.random() < 0.25:
        lower = (upper[0],) + upper[:-1]
    else:
        lower = tuple(rng.sample(FIVE_AXES, m))
    return {"upper": upper, "lower": lower}


def _contraction_entry(upper, lower, metric) -> bool:
    m = len(upper)
    eps_up = md.epsilon_upper(metric)
    eps_lo = md.epsilon_lower(metric)
    total = Fraction(0)
    for rest in itertools.product(FIVE_AXES, repeat=5 - m):
        total += eps_up.values[tuple(upper) + rest] * eps_lo.values[tuple(lower) + rest]
    expected = -math.factorial(5 - m) * metric.sign_xi * md.permutation_delta(upper, lower)
    return total == expected


def _holds_contraction(i, cfg):
    flipped = replace(cfg.metric, xi=-cfg.metric.xi)
    return _contraction_entry(i["upper"], i["lower"], cfg.metric) and _contraction_entry(
        i["upper"], i["lower"], flipped
    )


def _make_multivector(rng, cfg):
    return {"w": rand_form(rng, rng.randint(0, 5), cfg.max_degree, cls=MultiVector)}


def _holds_theta_roundtrip(i, cfg):
    w = i["w"]
    return md.theta_h_inv(md.theta_h(w, cfg.metric), cfg.metric) == w


def _holds_dual_involution(i, cfg):
    metric = _metric_for_dual(cfg)
    w = i["t"]
    return md.dual(md.dual(w, metric), metric) == w * (-metric.sign_xi)


def _make_same_rank_pair(rng, cfg):
    rank = rng.randint(0, 5)
    return {
        "s": rand_form(rng, rank, cfg.max_degree),
        "t": rand_form(rng, rank, cfg.max_degree),
    }


def _make_pairing_pair(rng, cfg):
    # Forms with disjoint components pair to zero and the comparison
    # degenerates to 0 == 0; redraw until the inner product survives.
    for _ in range(40):
        i = _make_same_rank_pair(rng, cfg)
        if not md.h_inner(i["s"], i["t"], cfg.metric).is_zero:
            break
    return i


def _holds_wedge_dual_pairing(i, cfg):
    s, t = i["s"], i["t"]
    metric = cfg.metric
    paired = md.epsilon_five_form(metric) * md.h_inner(s, t, metric)
    return fc.wedge(s, md.dual(t, metric)) == paired and fc.wedge(md.dual(s, metric), t) == paired


def _hodge4(W: FourForm, metric: MetricConfig) -> FourForm:
    """Four-label Hodge dual of a rank-2 form, straight from the index
    formula; the reference route for the label-5-free duality check."""
    out = {}
    for key in itertools.combinations(range(4), 2):
        comp = W.coeff(key)
        if comp.is_zero:
            continue
        rest = tuple(a for a in range(4) if a not in key)
        sign = metric.eta * fc.permutation_sign(key + rest)
        out[rest] = comp * (sign * Fraction(1, metric.g[key[0]] * metric.g[key[1]]))
    return FourForm(2, out)


def _make_zfree(rng, cfg):
    return {"w": rand_form(rng, 2, cfg.max_degree, axes=fc.COORD_AXES)}


def _holds_zfree_hodge(i, cfg):
    metric = _metric_for_dual(cfg)
    w = i["w"]
    return md.dual2_zfree(w, metric) == fc.lift(_hodge4(fc.project(w), metric))


DUALITY = (
    Identity("epsilon-reference", _make_epsilon_key, _holds_epsilon_reference),
    Identity("epsilon-contraction", _make_contraction, _holds_contraction),
    Identity("theta-roundtrip", _make_multivector, _holds_theta_roundtrip),
    Identity("dual-involution", _make_one_form, _holds_dual_involution),
    Identity("wedge-dual-pairing", _make_pairing_pair, _holds_wedge_dual_pairing),
    Identity("zfree-hodge", _make_zfree, _holds_zfree_hodge),
)


# lagrange -----------------------------------------------------------------------


def _make_el(rng, cfg):
    return {
        "L": rand_lagrangian(rng, 1, cfg.max_degree),
        "phi": rand_fields(rng, 1, cfg.max_degree),
    }


def _make_el_off_shell(rng, cfg):
    # Fields that happen to solve the drawn equations make the residual
    # comparison vacuous; redraw until the instance sits off shell.
    for _ in range(200):
        i = _make_el(rng, cfg)
        if not lg.el_residual(i["L"], i["phi"], 0).is_zero:
            break
    return i


def _make_el_flux(rng, cfg):
    deg = min(1, cfg.max_degree)
    maps = tuple(rand_poly(rng, 4, deg, max_terms=2) for _ in range(4))
    return {
        "L": rand_lagrangian(rng, 1, cfg.max_degree),
        "phi": rand_fields(rng, 1, cfg.max_degree),
        "V": ParamSurface(4, maps, rand_box(rng, 4)),
    }


def _holds_bd_lambda_residual(i, cfg):
    L, phi = i["L"], i["phi"]
    lam = lg.Lambda_form(L, phi, 0)
    return ca.bd(lam).coeff((0, 1, 2, 3, 5)) == lg.el_residual(L, phi, 0)


def _holds_three_way(i, cfg):
    L, phi = i["L"], i["phi"]
    solved = lg.el_residual(L, phi, 0).is_zero
    return lg.check_51(L, phi, 0) is solved and lg.check_55(L, phi, 0) is solved


def _holds_el_flux_route(i, cfg):
    lam = lg.Lambda_form(i["L"], i["phi"], 0)
    return ig.five_flux(lam, i["V"]) == ig.integrate_deg(ca.bd(lam), i["V"])


LAGRANGE = (
    Identity("bd-lambda-residual", _make_el_off_shell, _holds_bd_lambda_residual),
    Identity("three-way-equivalence", _make_el, _holds_three_way),
    Identity("el-flux-route", _make_el_flux, _holds_el_flux_route),
)


# appendix -----------------------------------------------------------------------


def conforming_array(weights: Sequence[Fraction]) -> IndexedArray:
    """Array with S[(i,) + j] = weights[i] * sign(j), the shape for which the
    transposition identity is stated."""
    m = len(weights)
    values = {}
    for i in range(m):
        for perm in itertools.permutations(range(m)):
            values[(i,) + perm] = weights[i] * fc.permutation_sign(perm)
    return IndexedArray(m + 1, tuple(range(m)), values)


def _make_transposition(rng, cfg):
    m = rng.randint(2, 5)
    return {"m": m, "weights": tuple(rand_fraction(rng) for _ in range(m))}


def _holds_transposition(i, cfg):
    return fc.transposition_identity_check(conforming_array(i["weights"]), i["m"])


def divergence_contraction_4(weights: Sequence[Poly], probes: Sequence[tuple[int, ...]]) -> bool:
    """Contracted-divergence reading of the transposition identity for a
    vector-valued volume form on the four coordinate labels."""

    def S(mu: int, key: tuple[int, ...]) -> Poly:
        return weights[mu] * fc.permutation_sign(key)

    cache: dict[tuple[int, ...], Poly] = {}

    def T(key: tuple[int, ...]) -> Poly:
        if key not in cache:
            total = Poly.zero(4)
            for mu in range(4):
                total = total + S(mu, (mu,) + key)
            cache[key] = total
        return cache[key]

    quarter = Fraction(1, math.factorial(4))
    sixth = Fraction(1, math.factorial(3))
    for idx in probes:
        lhs = Poly.zero(4)
        for mu in range(4):
            lhs = lhs + S(mu, idx).partial(mu)
        lhs = lhs * quarter
        rhs = Poly.zero(4)
        for perm in itertools.permutations(range(4)):
            sign = fc.permutation_sign(perm)
            reordered = tuple(idx[p] for p in perm)
            rhs = rhs + T(reordered[1:]).partial(reordered[0]) * sign
        rhs = rhs * (sixth * quarter)
        if lhs != rhs:
            return False
    return True


def divergence_contraction_5(weights: Sequence[Poly], probes: Sequence[tuple[int, ...]]) -> bool:
    """Same reading one level up: five labels, with the label-5 directional
    derivative acting as the identity."""

    def S(h: int, key: tuple[int, ...]) -> Poly:
        return weights[FIVE_AXES.index(h)] * fc.permutation_sign(key)

    cache: dict[tuple[int, ...], Poly] = {}

    def T(key: tuple[int, ...]) -> Poly:
        if key not in cache:
            total = Poly.zero(4)
            for h in FIVE_AXES:
                total = total + S(h, (h,) + key)
            cache[key] = total
        return cache[key]

    fifth = Fraction(1, math.factorial(5))
    quarter = Fraction(1, math.factorial(4))
    for idx in probes:
        lhs = Poly.zero(4)
        for h in FIVE_AXES:
            lhs = lhs + ca.bullet_partial(S(h, idx), h)
        lhs = lhs * fifth
        rhs = Poly.zero(4)
        for perm in itertools.permutations(range(5)):
            sign = fc.permutation_sign(perm)
            reordered = tuple(idx[p] for p in perm)
            rhs = rhs + ca.bullet_partial(T(reordered[1:]), reordered[0]) * sign
        rhs = rhs * (quarter * fifth)
        if lhs != rhs:
            return False
    return True


def _make_divergence_4(rng, cfg):
    probes = [tuple(rng.sample(range(4), 4)) for _ in range(2)]
    probes += [tuple(rng.choice(range(4)) for _ in range(4)) for _ in range(2)]
    return {
        "w0": rand_poly(rng, 4, cfg.max_degree),
        "w1": rand_poly(rng, 4, cfg.max_degree),
        "w2": rand_poly(rng, 4, cfg.max_degree),
        "w3": rand_poly(rng, 4, cfg.max_degree),
        "probes": tuple(probes),
    }


def _holds_divergence_4(i, cfg):
    return divergence_contraction_4([i["w0"], i["w1"], i["w2"], i["w3"]], i["probes"])


def _make_divergence_5(rng, cfg):
    probes = [tuple(rng.sample(FIVE_AXES, 5)) for _ in range(2)]
    probes += [tuple(rng.choice(FIVE_AXES) for _ in range(5)) for _ in range(2)]
    return {
        "w0": rand_poly(rng, 4, cfg.max_degree),
        "w1": rand_poly(rng, 4, cfg.max_degree),
        "w2": rand_poly(rng, 4, cfg.max_degree),
        "w3": rand_poly(rng, 4, cfg.max_degree),
        "w5": rand_poly(rng, 4, cfg.max_degree),
        "probes": tuple(probes),
    }


def _holds_divergence_5(i, cfg):
    weights = [i["w0"], i["w1"], i["w2"], i["w3"], i["w5"]]
    return divergence_contraction_5(weights, i["probes"])


APPENDIX = (
    Identity("transposition-identity", _make_transposition, _holds_transposition),
    Identity("divergence-contraction-4", _make_divergence_4, _holds_divergence_4),
    Identity("divergence-contraction-5", _make_divergence_5, _holds_divergence_5),
)


IDENTITIES: dict[str, tuple[Identity, ...]] = {
    "algebra": ALGEBRA,
    "calculus": CALCULUS,
    "stokes": STOKES,
    "flux": FLUX,
    "duality": DUALITY,
    "lagrange": LAGRANGE,
    "appendix": APPENDIX,
}


def identity(suite: str, name: str) -> Identity:
    for ident in IDENTITIES[suite]:
        if ident.name == name:
            return ident
    raise KeyError(f"no identity {name!r} in suite {suite!r}")


def run_suite(cfg: SuiteConfig) -> Report:
    records = []
    for suite in SUITE_NAMES:
        if suite not in cfg.suites:
            continue
        rng = random.Random(f"{cfg.seed}:{suite}")
        for ident in IDENTITIES[suite]:
            for index in range(cfg.trials):
                passed, counterexample = run_single(ident, rng, cfg)
                records.append(InstanceRecord(suite, ident.name, index, passed, counterexample))
    records.sort(key=lambda r: (SUITE_NAMES.index(r.suite), r.identity, r.index))
    return Report(tuple(records))


def emit_report(report: Report, format: str = "text") -> str:
    if format == "jsonl":
        lines = [
            json.dumps(
                {
                    "suite": r.suite,
                    "identity": r.identity,
                    "instance": r.index,
                    "pass": r.passed,
                    "counterexample": r.counterexample,
                },
                sort_keys=True,
            )
            for r in report.records
        ]
        return "\n".join(lines) + "\n"
    if format != "text":
        raise ValueError(f"unknown report format {format!r}")

    grouped: dict[tuple[str, str], list[InstanceRecord]] = {}
    for record in report.records:
        grouped.setdefault((record.suite, record.identity), []).append(record)
    lines = []
    for (suite, name), records in grouped.items():
        bad = [r for r in records if not r.passed]
        if bad:
            lines.append(f"FAIL {suite}/{name} ({len(records)} instances, {len(bad)} failed)")
            lines.append(f"    counterexample: {bad[0].counterexample}")
        else:
            lines.append(f"PASS {suite}/{name} ({len(records)} instances)")
    total = len(report.records)
    lines.append(
        f"{len(grouped)} identities, {total} instances, {len(report.failures)} failures"
    )
    return "\n".join(lines) + "\n"
