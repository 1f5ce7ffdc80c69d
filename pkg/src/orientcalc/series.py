"""Truncated power series with exact rational coefficients.

Only what the characteristic-class code needs: products, inverses,
logarithms, and a few classical generating functions in ``z = x**2``.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial

Series = list  # list[Fraction], index = power of z


def mul(a: Series, b: Series, order: int) -> Series:
    out = [Fraction(0)] * order
    for i, x in enumerate(a[:order]):
        if x:
            for j, y in enumerate(b[: order - i]):
                out[i + j] += x * y
    return out


def inverse(a: Series, order: int) -> Series:
    if a[0] == 0:
        raise ZeroDivisionError("series with zero constant term has no inverse")
    out = [Fraction(0)] * order
    out[0] = 1 / Fraction(a[0])
    for k in range(1, order):
        s = sum((a[i] * out[k - i] for i in range(1, min(k, len(a) - 1) + 1)), Fraction(0))
        out[k] = -s * out[0]
    return out


def log1(a: Series, order: int) -> Series:
    """log of a series with constant term 1, via log f = integral of f'/f."""
    if a[0] != 1:
        raise ValueError("log1 needs constant term 1")
    deriv = [Fraction(k) * a[k] for k in range(1, min(len(a), order))]
    deriv += [Fraction(0)] * (order - len(deriv))
    q = mul(deriv, inverse(a, order), order)
    return [Fraction(0)] + [q[k - 1] / k for k in range(1, order)]


def sinh_over_x(order: int, scale: Fraction = Fraction(1)) -> Series:
    """sinh(t)/t with t = scale * sqrt(z), as a series in z."""
    return [scale ** (2 * k) / factorial(2 * k + 1) for k in range(order)]


def cosh(order: int, scale: Fraction = Fraction(1)) -> Series:
    return [scale ** (2 * k) / factorial(2 * k) for k in range(order)]


def a_hat_series(order: int) -> Series:
    """(sqrt(z)/2) / sinh(sqrt(z)/2)."""
    return inverse(sinh_over_x(order, Fraction(1, 2)), order)


def l_series(order: int) -> Series:
    """sqrt(z) / tanh(sqrt(z))."""
    return mul(cosh(order), inverse(sinh_over_x(order), order), order)
