"""Alternating algebra over the five basis labels {0, 1, 2, 3, 5}.

The five-dimensional space splits as Z + E: labels 0..3 name the coordinate
directions of the patch, label 5 names the distinguished direction spanned by
the unit vector **1** (index 4 is never used, so component subscripts read the
same in four and five dimensions).  Forms and multivectors store only their
independent components, keyed by strictly increasing index tuples, with exact
polynomial coefficients.

Three graded types share the machinery: FiveForm (covariant, labels may
include 5), FourForm (covariant, labels 0..3 only), and MultiVector
(contravariant, labels may include 5).  A FourForm S corresponds to the
FiveForm lift(S) with no label-5 components, and s_from_t / t_from_s convert
between a rank-m form with label-5 components and the rank-(m-1) form hiding
inside it.

IndexedArray is a separate dense container for the antisymmetrization
identities, where arrays are indexed by arbitrary tuples rather than sorted
subsets.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

from fvx.polyfield import Poly, RationalLike

IndexKey = tuple[int, ...]

COORD_AXES: tuple[int, ...] = (0, 1, 2, 3)
FIVE_AXES: tuple[int, ...] = (0, 1, 2, 3, 5)


def permutation_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq``; 0 if any entry repeats."""
    if len(set(seq)) != len(seq):
        return 0
    sign = 1
    items = list(seq)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                sign = -sign
    return sign


def merge_sign(left: IndexKey, right: IndexKey) -> tuple[int, IndexKey]:
    """Sign and sorted key for concatenating two disjoint sorted keys."""
    inversions = 0
    for a in left:
        for b in right:
            if a > b:
                inversions += 1
    merged = tuple(sorted(left + right))
    return (-1 if inversions % 2 else 1), merged


class _Alternating:
    """Shared storage and linear structure for forms and multivectors."""

    AXES: tuple[int, ...] = FIVE_AXES
    SYMBOL: str = "?"

    __slots__ = ("rank", "coeffs")

    def __init__(self, rank: int, coeffs: Mapping[IndexKey, Poly | RationalLike] | None = None):
        if not 0 <= rank <= len(self.AXES):
            raise ValueError(f"rank {rank} out of range")
        canonical: dict[IndexKey, Poly] = {}
        axes = set(self.AXES)
        for key, value in (coeffs or {}).items():
            key = tuple(key)
            if len(key) != rank:
                raise ValueError(f"key {key!r} does not have rank {rank}")
            if list(key) != sorted(set(key)):
                raise ValueError(f"key {key!r} is not strictly increasing")
            if not set(key) <= axes:
                raise ValueError(f"key {key!r} uses labels outside {self.AXES}")
            if not isinstance(value, Poly):
                value = Poly.const(value, 4)
            if value.nvars != 4:
                raise ValueError("coefficients must be polynomials in the four coordinates")
            if value.is_zero:
                continue
            if key in canonical:
                value = canonical[key] + value
            if value.is_zero:
                canonical.pop(key, None)
            else:
                canonical[key] = value
        object.__setattr__(self, "rank", rank)
        object.__setattr__(self, "coeffs", canonical)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError(f"{type(self).__name__} is immutable")

    @classmethod
    def zero(cls, rank: int):
        return cls(rank, {})

    @classmethod
    def from_scalar(cls, value: Poly | RationalLike):
        return cls(0, {(): value})

    def coeff(self, key: Iterable[int]) -> Poly:
        return self.coeffs.get(tuple(key), Poly.zero(4))

    def component(self, indices: Iterable[int]) -> Poly:
        """Fully antisymmetric component at an arbitrary index tuple."""
        indices = tuple(indices)
        sign = permutation_sign(indices)
        if sign == 0:
            return Poly.zero(4)
        return sign * self.coeff(sorted(indices))

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def _same_kind(self, other) -> None:
        if type(other) is not type(self):
            raise TypeError(f"expected {type(self).__name__}, got {type(other).__name__}")
        if other.rank != self.rank:
            raise ValueError("forms of different rank cannot be combined linearly")

    def __add__(self, other):
        self._same_kind(other)
        merged = dict(self.coeffs)
        for key, value in other.coeffs.items():
            merged[key] = merged.get(key, Poly.zero(4)) + value
        return type(self)(self.rank, merged)

    def __neg__(self):
        return type(self)(self.rank, {k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, factor: Poly | RationalLike):
        if isinstance(factor, _Alternating):
            raise TypeError("use wedge() for products of forms")
        return type(self)(self.rank, {k: v * factor for k, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other: object) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return self.rank == other.rank and self.coeffs == other.coeffs

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        if self.is_zero:
            return f"{type(self).__name__}({self.rank}, 0)"
        parts = [f"{key}: {self.coeffs[key]!r}" for key in sorted(self.coeffs)]
        return f"{type(self).__name__}({self.rank}, {{{', '.join(parts)}}})"


class FiveForm(_Alternating):
    AXES = FIVE_AXES
    SYMBOL = "o"


class FourForm(_Alternating):
    AXES = COORD_AXES
    SYMBOL = "dx"


class MultiVector(_Alternating):
    AXES = FIVE_AXES
    SYMBOL = "e"

    @property
    def comps(self) -> Mapping[IndexKey, Poly]:
        return self.coeffs


# -- basis elements ----------------------------------------------------------


def basis_one_form(axis: int) -> FiveForm:
    """The coordinate one-form along one of the five labels."""
    if axis not in FIVE_AXES:
        raise ValueError(f"no basis label {axis}")
    return FiveForm(1, {(axis,): 1})


def j_form() -> FiveForm:
    """The distinguished one-form dual to **1** (the label-5 basis form)."""
    return basis_one_form(5)


def dx_form(axis: int) -> FourForm:
    if axis not in COORD_AXES:
        raise ValueError(f"no coordinate label {axis}")
    return FourForm(1, {(axis,): 1})


def basis_vector(axis: int) -> MultiVector:
    if axis not in FIVE_AXES:
        raise ValueError(f"no basis label {axis}")
    return MultiVector(1, {(axis,): 1})


def one_vector() -> MultiVector:
    """The distinguished vector **1** spanning the E direction."""
    return basis_vector(5)


# -- graded products and pairings --------------------------------------------


def wedge(a: _Alternating, b: _Alternating) -> _Alternating:
    """Antisymmetrized product; signs follow from sorting the merged labels."""
    if type(a) is not type(b):
        raise TypeError("wedge requires operands of the same kind")
    top = len(a.AXES)
    if a.rank + b.rank > top:
        raise ValueError(f"rank exceeds {top}")
    out: dict[IndexKey, Poly] = {}
    for ka, ca in a.coeffs.items():
        set_a = set(ka)
        for kb, cb in b.coeffs.items():
            if set_a & set(kb):
                continue
            sign, key = merge_sign(ka, kb)
            term = sign * (ca * cb)
            out[key] = out.get(key, Poly.zero(4)) + term
    return type(a)(a.rank + b.rank, out)


def contract(t: FiveForm, w: MultiVector) -> Poly:
    """Full pairing of a rank-m form with a rank-m multivector."""
    if not isinstance(t, FiveForm) or not isinstance(w, MultiVector):
        raise TypeError("contract pairs a FiveForm with a MultiVector")
    if t.rank != w.rank:
        raise ValueError("rank mismatch between form and multivector")
    total = Poly.zero(4)
    for key, coeff in t.coeffs.items():
        other = w.coeffs.get(key)
        if other is not None:
            total = total + coeff * other
    return total


def z_part(t: _Alternating) -> _Alternating:
    """Components whose labels avoid 5."""
    return type(t)(t.rank, {k: v for k, v in t.coeffs.items() if 5 not in k})


def e_part(t: _Alternating) -> _Alternating:
    """Components whose labels include 5."""
    return type(t)(t.rank, {k: v for k, v in t.coeffs.items() if 5 in k})


def lift(S: FourForm) -> FiveForm:
    """Embed a four-label form as a five-label form with no label-5 part."""
    if not isinstance(S, FourForm):
        raise TypeError("lift expects a FourForm")
    return FiveForm(S.rank, dict(S.coeffs))


def project(s: FiveForm) -> FourForm:
    """Forget the label-5 components and read the rest as a four-label form."""
    if not isinstance(s, FiveForm):
        raise TypeError("project expects a FiveForm")
    return FourForm(s.rank, {k: v for k, v in s.coeffs.items() if 5 not in k})


def t_from_s(s: FiveForm) -> FiveForm:
    """Append the label-5 factor: s -> s wedge j."""
    return wedge(s, j_form())


def s_from_t(t: FiveForm) -> FiveForm:
    """Strip the trailing label 5: the rank-(m-1) form with s_K = t_{K,5}."""
    if t.rank < 1:
        raise ValueError("rank-0 form has no label-5 slot")
    out = {k[:-1]: v for k, v in t.coeffs.items() if k[-1] == 5}
    return FiveForm(t.rank - 1, out)


# -- dense indexed arrays -----------------------------------------------------


class IndexedArray:
    """Dense rational array over tuples from a fixed finite index set."""

    __slots__ = ("arity", "index_set", "values")

    def __init__(
        self,
        arity: int,
        index_set: Sequence[int],
        values: Mapping[IndexKey, RationalLike] | None = None,
    ):
        if arity < 1:
            raise ValueError("arity must be positive")
        index_set = tuple(index_set)
        if len(set(index_set)) != len(index_set):
            raise ValueError("index set has repeats")
        table: dict[IndexKey, Fraction] = {}
        values = values or {}
        allowed = set(index_set)
        for key in values:
            key = tuple(key)
            if len(key) != arity or not set(key) <= allowed:
                raise ValueError(f"bad index tuple {key!r}")
        for idx in itertools.product(index_set, repeat=arity):
            table[idx] = Fraction(values.get(idx, 0))
        object.__setattr__(self, "arity", arity)
        object.__setattr__(self, "index_set", index_set)
        object.__setattr__(self, "values", table)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("IndexedArray is immutable")

    @classmethod
    def from_function(cls, arity: int, index_set: Sequence[int], fn: Callable[..., RationalLike]) -> "IndexedArray":
        values = {
            idx: fn(*idx)
            for idx in itertools.product(tuple(index_set), repeat=arity)
        }
        return cls(arity, index_set, values)

    def __getitem__(self, idx: Iterable[int]) -> Fraction:
        return self.values[tuple(idx)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, IndexedArray):
            return NotImplemented
        return (
            self.arity == other.arity
            and self.index_set == other.index_set
            and self.values == other.values
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values.values())

    def __mul__(self, factor: RationalLike) -> "IndexedArray":
        factor = Fraction(factor)
        return IndexedArray(
            self.arity, self.index_set, {k: v * factor for k, v in self.values.items()}
        )

    __rmul__ = __mul__

    def __add__(self, other: "IndexedArray") -> "IndexedArray":
        if self.arity != other.arity or self.index_set != other.index_set:
            raise ValueError("arrays over different shapes")
        return IndexedArray(
            self.arity,
            self.index_set,
            {k: v + other.values[k] for k, v in self.values.items()},
        )

    def __sub__(self, other: "IndexedArray") -> "IndexedArray":
        return self + (-1 * other)

    def __repr__(self) -> str:
        nonzero = {k: str(v) for k, v in self.values.items() if v}
        return f"IndexedArray({self.arity}, {self.index_set}, {nonzero})"


def antisymmetrize(array: IndexedArray, positions: Sequence[int]) -> IndexedArray:
    """Average over signed permutations of the named slots."""
    positions = sorted(set(positions))
    if not positions:
        raise ValueError("positions must be nonempty")
    if positions[0] < 0 or positions[-1] >= array.arity:
        raise ValueError("slot position out of range")
    perms = list(itertools.permutations(range(len(positions))))
    scale = Fraction(1, math.factorial(len(positions)))
    out: dict[IndexKey, Fraction] = {}
    for idx in array.values:
        sub = [idx[p] for p in positions]
        total = Fraction(0)
        for perm in perms:
            permuted = list(idx)
            for slot, src in zip(positions, perm):
                permuted[slot] = sub[src]
            total += permutation_sign(perm) * array.values[tuple(permuted)]
        out[idx] = total * scale
    return IndexedArray(array.arity, array.index_set, out)


def transposition_identity_check(array: IndexedArray, m: int) -> bool:
    """Exact check that moving the lead slot past m antisymmetric slots
    costs the factor m * (-1)^(m+1) after re-antisymmetrizing."""
    if not 2 <= m <= 5:
        raise ValueError("m must be between 2 and 5")
    if array.arity != m + 1:
        raise ValueError("array arity must be m+1")
    if len(array.index_set) != m:
        raise ValueError("slots must range over exactly m values")
    # Antisymmetry via adjacent transpositions: every nonzero entry must be
    # negated by each swap, which chains to the full permutation statement.
    for idx, value in array.values.items():
        if not value:
            continue
        for k in range(1, m):
            swapped = list(idx)
            swapped[k], swapped[k + 1] = swapped[k + 1], swapped[k]
            if array.values[tuple(swapped)] != -value:
                raise ValueError("array is not antisymmetric in its last m slots")
    factor = Fraction(m * (-1) ** (m + 1), math.factorial(m))
    perms = list(itertools.permutations(range(m)))
    # Entries with a repeated tail vanish on both sides; only distinct tails
    # can carry weight.
    for tail in itertools.permutations(array.index_set):
        for i in array.index_set:
            total = Fraction(0)
            for perm in perms:
                moved = tuple(tail[p] for p in perm) + (i,)
                total += permutation_sign(perm) * array.values[moved]
            if array.values[(i,) + tail] != factor * total:
                return False
    return True
