"""Thin layer over :mod:`mpmath.iv` for the two maps F(t) = 3^t - 1 and its inverse.

mpmath keeps the interval precision on a shared context, so every entry point
here takes an explicit ``prec`` and restores the previous setting on exit.
"""

from __future__ import annotations

from contextlib import contextmanager

from mpmath import iv, mp

__all__ = [
    "working_precision",
    "point",
    "span",
    "lo",
    "hi",
    "F_iv",
    "Finv_iv",
    "log3_2",
    "exact_log3",
]


@contextmanager
def working_precision(prec):
    old = iv.prec
    iv.prec = int(prec)
    try:
        yield
    finally:
        iv.prec = old


def point(x):
    """Outward-rounded interval around an int, mpf or decimal string."""
    return iv.mpf(x)


def span(a, b):
    return iv.mpf([a, b])


def lo(x):
    return mp.make_mpf(x._mpi_[0])


def hi(x):
    return mp.make_mpf(x._mpi_[1])


def exact_log3(m):
    """Return p if m == 3**p for an integer p >= 0, else None."""
    if m < 1:
        return None
    p = 0
    while m % 3 == 0:
        m //= 3
        p += 1
    return p if m == 1 else None


def _as_small_int(x):
    a, b = lo(x), hi(x)
    if a == b and a == int(a) and abs(a) < 2**20:
        return int(a)
    return None


def F_iv(x):
    """Enclosure of 3^x - 1; exact when x is a small integer point."""
    n = _as_small_int(x)
    if n is not None and n >= 0:
        return iv.mpf(3**n - 1)
    return iv.exp(x * iv.log(3)) - 1


def Finv_iv(x):
    """Enclosure of log_3(x + 1); exact when x + 1 is a power of three."""
    n = _as_small_int(x)
    if n is not None:
        p = exact_log3(n + 1)
        if p is not None:
            return iv.mpf(p)
    return iv.log(x + 1) / iv.log(3)


def log3_2():
    return iv.log(2) / iv.log(3)
