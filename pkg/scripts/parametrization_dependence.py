"""Trace one segment at two speeds and compare the integral types.

The plain pullback integral of a coordinate 1-form is a property of the
oriented point set, so both parametrizations give the same number.  The
full-frame variant keeps the raw parameter value in the distinguished slot
of the tangent frame, and the two traversals disagree; the frame-completed
integral (the one the flux identities use) restores invariance.  All
numbers are exact rationals.
"""

from fractions import Fraction

from fvx import FiveForm, ParamSurface, integrate_full_frame, integrate_m, j_form, parse_poly
from fvx.polyfield import COORD_NAMES, Poly


def segment(speed: int, upper: Fraction) -> ParamSurface:
    zero = Poly.zero(1)
    return ParamSurface(
        1,
        (Poly.variable(0, 1) * speed, zero, zero, zero),
        ((Fraction(0), upper),),
    )


def main() -> None:
    slow = segment(1, Fraction(1))
    fast = segment(2, Fraction(1, 2))
    plain = FiveForm(1, {(0,): parse_poly("x0", COORD_NAMES)})
    full = j_form()

    print("same segment x0 in [0, 1], traced at unit and double speed")
    print()
    print(f"{'integral':>34}  unit speed  double speed")
    print(
        f"{'plain pullback of x0 dx0':>34}"
        f"  {str(integrate_m(plain, slow)):>10}  {str(integrate_m(plain, fast)):>12}"
    )
    print(
        f"{'full-frame value of the unit slot':>34}"
        f"  {str(integrate_full_frame(full, slow)):>10}"
        f"  {str(integrate_full_frame(full, fast)):>12}"
    )
    print()
    print("the full-frame number follows the parametrization, not the segment")


if __name__ == "__main__":
    main()
