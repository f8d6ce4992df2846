"""Structured-text file formats for forms, surfaces, Lagrangians, metrics.

All payloads are JSON with polynomial values in the canonical text grammar.
Index subsets are digit strings in increasing order ("015" for the key
(0, 1, 5)); the digit 4 never appears.  Rational scalars may be written as
JSON integers or as strings like "-3/2".  Errors carry enough context to
locate the offending entry.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any, Mapping, Sequence

from fvx.forms_core import FIVE_AXES, FiveForm
from fvx.integration import ParamSurface
from fvx.lagrange import FieldSet, LagrangianSpec, lagrangian_names
from fvx.metric_dual import MetricConfig
from fvx.polyfield import COORD_NAMES, Poly, format_poly, param_names, parse_poly


class FormatError(ValueError):
    """A structured-text payload that does not match its schema."""


def parse_rational(value: Any, where: str) -> Fraction:
    if isinstance(value, bool):
        raise FormatError(f"{where}: expected a rational, got a boolean")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"{where}: bad rational {value!r} ({exc})") from None
    raise FormatError(f"{where}: expected a rational, got {type(value).__name__}")


def format_rational(value: Fraction) -> int | str:
    return int(value) if value.denominator == 1 else str(value)


def _expect_mapping(data: Any, where: str) -> Mapping:
    if not isinstance(data, Mapping):
        raise FormatError(f"{where}: expected an object, got {type(data).__name__}")
    return data


def _parse_poly(text: Any, names: Sequence[str], where: str) -> Poly:
    if not isinstance(text, str):
        raise FormatError(f"{where}: expected a polynomial string")
    try:
        return parse_poly(text, names)
    except ValueError as exc:
        raise FormatError(f"{where}: {exc}") from None


def _parse_key(key: str, rank: int) -> tuple[int, ...]:
    where = f"coeffs key {key!r}"
    if not isinstance(key, str) or not key.isdigit() and key != "":
        raise FormatError(f"{where}: keys are digit strings")
    labels = tuple(int(ch) for ch in key)
    if any(a not in FIVE_AXES for a in labels):
        raise FormatError(f"{where}: labels must come from 0,1,2,3,5")
    if list(labels) != sorted(set(labels)):
        raise FormatError(f"{where}: labels must be strictly increasing")
    if len(labels) != rank:
        raise FormatError(f"{where}: has {len(labels)} labels but rank is {rank}")
    return labels


def form_from_dict(data: Any) -> FiveForm:
    data = _expect_mapping(data, "form")
    unknown = set(data) - {"rank", "coeffs"}
    if unknown:
        raise FormatError(f"form: unknown fields {sorted(unknown)}")
    rank = data.get("rank")
    if not isinstance(rank, int) or isinstance(rank, bool) or not 0 <= rank <= 5:
        raise FormatError("form: rank must be an integer between 0 and 5")
    coeffs = _expect_mapping(data.get("coeffs", {}), "form coeffs")
    out = {}
    for key, text in coeffs.items():
        labels = _parse_key(key, rank)
        out[labels] = _parse_poly(text, COORD_NAMES, f"coeffs[{key!r}]")
    return FiveForm(rank, out)


def form_to_dict(form: FiveForm) -> dict:
    coeffs = {
        "".join(str(a) for a in key): format_poly(form.coeffs[key], COORD_NAMES)
        for key in sorted(form.coeffs)
    }
    return {"rank": form.rank, "coeffs": coeffs}


def surface_from_dict(data: Any) -> ParamSurface:
    data = _expect_mapping(data, "surface")
    unknown = set(data) - {"dim", "map", "box"}
    if unknown:
        raise FormatError(f"surface: unknown fields {sorted(unknown)}")
    dim = data.get("dim")
    if not isinstance(dim, int) or isinstance(dim, bool) or not 0 <= dim <= 4:
        raise FormatError("surface: dim must be an integer between 0 and 4")
    maps = data.get("map")
    if not isinstance(maps, Sequence) or isinstance(maps, str) or len(maps) != 4:
        raise FormatError("surface: map must list four coordinate polynomials")
    names = param_names(dim)
    polys = tuple(_parse_poly(entry, names, f"map[{k}]") for k, entry in enumerate(maps))
    box_data = data.get("box", [])
    if not isinstance(box_data, Sequence) or isinstance(box_data, str) or len(box_data) != dim:
        raise FormatError(f"surface: box must list {dim} bound pairs")
    box = []
    for k, pair in enumerate(box_data):
        if not isinstance(pair, Sequence) or isinstance(pair, str) or len(pair) != 2:
            raise FormatError(f"surface: box[{k}] must be a pair [a, b]")
        box.append(
            (parse_rational(pair[0], f"box[{k}][0]"), parse_rational(pair[1], f"box[{k}][1]"))
        )
    try:
        return ParamSurface(dim, polys, tuple(box))
    except ValueError as exc:
        raise FormatError(f"surface: {exc}") from None


def surface_to_dict(V: ParamSurface) -> dict:
    names = param_names(V.dim)
    return {
        "dim": V.dim,
        "map": [format_poly(p, names) for p in V.map],
        "box": [[format_rational(a), format_rational(b)] for a, b in V.box],
    }


def lagrangian_from_dict(data: Any) -> LagrangianSpec:
    data = _expect_mapping(data, "lagrangian")
    unknown = set(data) - {"N", "density"}
    if unknown:
        raise FormatError(f"lagrangian: unknown fields {sorted(unknown)}")
    n_fields = data.get("N")
    if not isinstance(n_fields, int) or isinstance(n_fields, bool) or n_fields < 1:
        raise FormatError("lagrangian: N must be a positive integer")
    density = _parse_poly(data.get("density"), lagrangian_names(n_fields), "density")
    return LagrangianSpec(n_fields, density)


def lagrangian_to_dict(L: LagrangianSpec) -> dict:
    return {"N": L.n_fields, "density": format_poly(L.density, lagrangian_names(L.n_fields))}


def fields_from_list(data: Any) -> FieldSet:
    if not isinstance(data, Sequence) or isinstance(data, str):
        raise FormatError("fields: expected a list of coordinate polynomials")
    polys = tuple(_parse_poly(entry, COORD_NAMES, f"fields[{k}]") for k, entry in enumerate(data))
    try:
        return FieldSet(polys)
    except ValueError as exc:
        raise FormatError(f"fields: {exc}") from None


def fields_to_list(phi: FieldSet) -> list[str]:
    return [format_poly(p, COORD_NAMES) for p in phi.fields]


def metric_from_dict(data: Any) -> MetricConfig:
    data = _expect_mapping(data, "cfg")
    unknown = set(data) - {"g", "xi", "sigma", "eta"}
    if unknown:
        raise FormatError(f"cfg: unknown fields {sorted(unknown)}")
    kwargs: dict[str, Any] = {}
    if "g" in data:
        g = data["g"]
        if not isinstance(g, Sequence) or isinstance(g, str) or len(g) != 4:
            raise FormatError("cfg: g must list four signs")
        kwargs["g"] = tuple(int(parse_rational(entry, "g entry")) for entry in g)
    if "xi" in data:
        kwargs["xi"] = parse_rational(data["xi"], "xi")
    if "sigma" in data:
        kwargs["sigma"] = parse_rational(data["sigma"], "sigma")
    if "eta" in data:
        eta = data["eta"]
        if not isinstance(eta, int) or isinstance(eta, bool):
            raise FormatError("cfg: eta must be +1 or -1")
        kwargs["eta"] = eta
    try:
        return MetricConfig(**kwargs)
    except ValueError as exc:
        raise FormatError(f"cfg: {exc}") from None


def metric_to_dict(cfg: MetricConfig) -> dict:
    return {
        "g": list(cfg.g),
        "xi": format_rational(cfg.xi),
        "sigma": format_rational(cfg.sigma),
        "eta": cfg.eta,
    }


def load_json(path: str) -> Any:
    try:
        with open(path) as handle:
            return json.load(handle)
    except OSError as exc:
        raise FormatError(f"{path}: {exc.strerror or exc}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _wrap(path: str, fn, data: Any):
    try:
        return fn(data)
    except FormatError as exc:
        raise FormatError(f"{path}: {exc}") from None


def load_form(path: str) -> FiveForm:
    return _wrap(path, form_from_dict, load_json(path))


def load_surface(path: str) -> ParamSurface:
    return _wrap(path, surface_from_dict, load_json(path))


def load_lagrangian(path: str) -> LagrangianSpec:
    return _wrap(path, lagrangian_from_dict, load_json(path))


def load_fields(path: str) -> FieldSet:
    return _wrap(path, fields_from_list, load_json(path))


def load_metric(path: str) -> MetricConfig:
    return _wrap(path, metric_from_dict, load_json(path))


def form_to_text(form: FiveForm) -> str:
    """Human-readable component listing, one sorted key per line."""
    lines = [f"rank {form.rank}"]
    if form.is_zero:
        lines.append("(zero)")
    for key in sorted(form.coeffs):
        label = "".join(str(a) for a in key) or "scalar"
        lines.append(f"{label}: {format_poly(form.coeffs[key], COORD_NAMES)}")
    return "\n".join(lines)
