"""Metric data, the five-index alternating tensor, and the duality maps.

The metric is block-diagonal over the five labels: four signs on the
coordinate block and a nonzero rational xi on the label-5 direction.  All
normalizations are kept rational by restricting |det h| to perfect rational
squares; outside that family the alternating tensor has no rational
components and the constructors refuse.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from fvx.forms_core import (
    FIVE_AXES,
    FiveForm,
    IndexedArray,
    MultiVector,
    e_part,
    permutation_sign,
    s_from_t,
)
from fvx.polyfield import Poly


@dataclass(frozen=True)
class MetricConfig:
    """Diagonal metric with signs g on the coordinate block and h_55 = xi.

    sigma is the scale constant of the distinguished basis vector; it only
    enters the reported constants kappa and varpi, never the component
    formulas in the fixed basis used here.  eta is the orientation flag.
    """

    g: tuple[int, int, int, int] = (1, -1, -1, -1)
    xi: Fraction = Fraction(-1)
    sigma: Fraction = Fraction(1)
    eta: int = 1

    def __post_init__(self):
        object.__setattr__(self, "g", tuple(self.g))
        if len(self.g) != 4 or any(s not in (1, -1) for s in self.g):
            raise ValueError("g must be four signs")
        object.__setattr__(self, "xi", Fraction(self.xi))
        if not self.xi:
            raise ValueError("xi must be nonzero")
        object.__setattr__(self, "sigma", Fraction(self.sigma))
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.eta not in (1, -1):
            raise ValueError("eta must be +1 or -1")

    def h(self, label: int) -> Fraction:
        if label == 5:
            return self.xi
        if label in (0, 1, 2, 3):
            return Fraction(self.g[label])
        raise ValueError(f"no basis label {label}")

    @property
    def sign_xi(self) -> int:
        return 1 if self.xi > 0 else -1

    @property
    def det_h(self) -> Fraction:
        det = Fraction(1)
        for s in self.g:
            det *= s
        return det * self.xi

    @property
    def kappa(self) -> Fraction:
        """|det h|^(1/2); must be rational for the tensor components to be."""
        mag = abs(self.det_h)
        rn, rd = math.isqrt(mag.numerator), math.isqrt(mag.denominator)
        if rn * rn != mag.numerator or rd * rd != mag.denominator:
            raise ValueError("non-rational normalization")
        return Fraction(rn, rd)

    @property
    def varpi(self) -> Fraction:
        return self.kappa / self.sigma


DEFAULT_CFG = MetricConfig()


def _complement(key: Sequence[int]) -> tuple[int, ...]:
    return tuple(a for a in FIVE_AXES if a not in key)


def epsilon_lower(cfg: MetricConfig = DEFAULT_CFG) -> IndexedArray:
    """Totally antisymmetric array with eps_{01235} = eta * |det h|^(1/2)."""
    scale = cfg.eta * cfg.kappa
    return IndexedArray.from_function(
        5, FIVE_AXES, lambda *idx: scale * permutation_sign(idx)
    )


def epsilon_upper(cfg: MetricConfig = DEFAULT_CFG) -> IndexedArray:
    """All five indices raised with the inverse metric, one factor per slot."""
    lower = epsilon_lower(cfg)
    values = {}
    for idx, value in lower.values.items():
        if not value:
            continue
        for label in idx:
            value /= cfg.h(label)
        values[idx] = value
    return IndexedArray(5, FIVE_AXES, values)


def permutation_delta(upper: Sequence[int], lower: Sequence[int]) -> int:
    """Generalized Kronecker symbol: determinant of the incidence pattern."""
    if len(upper) != len(lower):
        raise ValueError("index lists of different length")
    n = len(upper)
    total = 0
    for perm in itertools.permutations(range(n)):
        if all(upper[i] == lower[perm[i]] for i in range(n)):
            total += permutation_sign(perm)
    return total


def _repeated_index_samples(m: int):
    if m < 2:
        return []
    distinct = FIVE_AXES[:m]
    repeated = (0, 0) + FIVE_AXES[1 : m - 1]
    return [(repeated, distinct), (distinct, repeated), (repeated, repeated)]


def epsilon_contraction(m: int, cfg: MetricConfig = DEFAULT_CFG) -> bool:
    """Contract m free index pairs against 5-m summed ones and compare with
    -(5-m)! * sign(xi) * delta, exhaustively over distinct index tuples and
    on a sample of repeated tuples (where both sides must vanish)."""
    if not 0 <= m <= 5:
        raise ValueError("m must be between 0 and 5")
    lower = epsilon_lower(cfg)
    upper = epsilon_upper(cfg)
    target = Fraction(-math.factorial(5 - m) * cfg.sign_xi)
    for A in itertools.permutations(FIVE_AXES, m):
        rest = _complement(A)
        for B in itertools.permutations(FIVE_AXES, m):
            setB = set(B)
            total = Fraction(0)
            for C in itertools.permutations(rest, 5 - m):
                if setB & set(C):
                    continue
                total += upper[A + C] * lower[B + C]
            if total != target * permutation_delta(A, B):
                return False
    for A, B in _repeated_index_samples(m):
        total = Fraction(0)
        for C in itertools.permutations(FIVE_AXES, 5 - m):
            total += upper[A + C] * lower[B + C]
        if total != 0 or permutation_delta(A, B) != 0:
            return False
    return True


# -- the two lowering maps and the dual ----------------------------------------


def theta_epsilon(w: MultiVector, cfg: MetricConfig = DEFAULT_CFG) -> FiveForm:
    """Contract a rank-m multivector into the alternating tensor, leaving a
    rank-(5-m) form."""
    if not isinstance(w, MultiVector):
        raise TypeError("theta_epsilon expects a MultiVector")
    scale = cfg.eta * cfg.kappa
    out: dict[tuple, Poly] = {}
    for key, comp in w.coeffs.items():
        rest = _complement(key)
        sign = permutation_sign(key + rest)
        out[rest] = out.get(rest, Poly.zero(4)) + comp * (scale * sign)
    return FiveForm(5 - w.rank, out)


def epsilon_pair(w: MultiVector, v: MultiVector, cfg: MetricConfig = DEFAULT_CFG) -> Poly:
    """Full contraction of two multivectors of complementary rank into the
    alternating tensor."""
    if w.rank + v.rank != 5:
        raise ValueError("ranks must sum to five")
    scale = cfg.eta * cfg.kappa
    total = Poly.zero(4)
    for key, comp in w.coeffs.items():
        rest = _complement(key)
        other = v.coeffs.get(rest)
        if other is not None:
            total = total + comp * other * (scale * permutation_sign(key + rest))
    return total


def theta_h(w: MultiVector, cfg: MetricConfig = DEFAULT_CFG) -> FiveForm:
    """Lower every index with the diagonal metric."""
    out = {}
    for key, comp in w.coeffs.items():
        factor = Fraction(1)
        for label in key:
            factor *= cfg.h(label)
        out[key] = comp * factor
    return FiveForm(w.rank, out)


def theta_h_inv(t: FiveForm, cfg: MetricConfig = DEFAULT_CFG) -> MultiVector:
    """Raise every index with the inverse diagonal metric."""
    out = {}
    for key, comp in t.coeffs.items():
        factor = Fraction(1)
        for label in key:
            factor /= cfg.h(label)
        out[key] = comp * factor
    return MultiVector(t.rank, out)


def h_inner(s: FiveForm, t: FiveForm, cfg: MetricConfig = DEFAULT_CFG) -> Poly:
    """Inner product of equal-rank forms: s_K t^K over sorted keys."""
    if s.rank != t.rank:
        raise ValueError("forms of different rank")
    total = Poly.zero(4)
    for key, comp in s.coeffs.items():
        other = t.coeffs.get(key)
        if other is None:
            continue
        factor = Fraction(1)
        for label in key:
            factor /= cfg.h(label)
        total = total + comp * other * factor
    return total


def epsilon_five_form(cfg: MetricConfig = DEFAULT_CFG) -> FiveForm:
    """The alternating tensor as a rank-5 form."""
    return theta_epsilon(MultiVector.from_scalar(1), cfg)


def dual(w: FiveForm, cfg: MetricConfig = DEFAULT_CFG) -> FiveForm:
    """Rank-m form to rank-(5-m) form: raise all indices, then contract into
    the alternating tensor.  Swaps the plain and label-5 blocks."""
    if not isinstance(w, FiveForm):
        raise TypeError("dual expects a FiveForm")
    scale = cfg.eta * cfg.kappa
    out: dict[tuple, Poly] = {}
    for key, comp in w.coeffs.items():
        factor = Fraction(1)
        for label in key:
            factor /= cfg.h(label)
        rest = _complement(key)
        sign = permutation_sign(key + rest)
        out[rest] = out.get(rest, Poly.zero(4)) + comp * (factor * scale * sign)
    return FiveForm(5 - w.rank, out)


def dual2_zfree(w: FiveForm, cfg: MetricConfig = DEFAULT_CFG) -> FiveForm:
    """Duality of plain rank-2 forms induced by stripping the label-5 block
    of the full dual; normalized to match the four-label Hodge dual."""
    if w.rank != 2:
        raise ValueError("rank must be 2")
    if not e_part(w).is_zero:
        raise ValueError("nonzero label-5 part")
    return s_from_t(dual(w, cfg)) * (Fraction(1) / cfg.kappa)
