"""Angular momentum basis of the Landau levels.

``phi(q, k)`` is obtained from the lowest-level state ``z**k exp(-b|x|^2/4)``
by q applications of the creation operator ``a* = -2i (d/dz - b zbar / 4)``.
In closed form, with ``t = b r^2 / 2`` and ``d = k - q``::

    phi(q, k) = c(q, k) sqrt(b / 2 pi) sqrt(n! / (n + |d|)!)
                * t^{|d|/2} L_n^{(|d|)}(t) exp(-t/2) exp(i d theta),
    n = min(q, k),   c(q, k) = (-i)^q (-1)^{max(q - k, 0)}.

The closed form is what the matrix elements use; :func:`ladder_polynomial`
rebuilds the same functions from the ladder definition so the two can be
compared coefficient by coefficient.
"""

from __future__ import annotations

import math
from collections import defaultdict

import numpy as np

__all__ = [
    "basis_phase",
    "log_radial_norm",
    "explicit_polynomial",
    "ladder_polynomial",
    "raise_polynomial",
    "polynomial_distance",
    "phi_value",
]


def basis_phase(q, k):
    """Unimodular constant c(q, k) of the closed form."""
    return (-1j) ** q * (-1) ** max(q - k, 0)


def log_radial_norm(q, k):
    """ln sqrt(n!/(n+|d|)!) for the closed-form radial factor."""
    n, d = min(q, k), abs(k - q)
    return 0.5 * (math.lgamma(n + 1) - math.lgamma(n + d + 1))


def explicit_polynomial(q, k, b):
    """Closed form of phi(q, k) as ``{(i, j): coeff}`` meaning sum coeff z^i zbar^j, times G."""
    n, d = min(q, k), k - q
    ad = abs(d)
    pref = basis_phase(q, k) * math.sqrt(b / (2.0 * math.pi)) * math.exp(log_radial_norm(q, k))
    pref *= (b / 2.0) ** (ad / 2.0)
    out = {}
    for j in range(n + 1):
        lag = math.comb(n + ad, n - j) * (-1) ** j / math.factorial(j)
        c = pref * lag * (b / 2.0) ** j
        key = (j + d, j) if d >= 0 else (j, j + ad)
        out[key] = out.get(key, 0.0) + c
    return out


def raise_polynomial(poly, b):
    """a*(P G) = -2i (dP/dz - (b/2) zbar P) G on the coefficient dictionary."""
    out = defaultdict(complex)
    for (i, j), c in poly.items():
        if i > 0:
            out[(i - 1, j)] += -2j * i * c
        out[(i, j + 1)] += 2j * (b / 2.0) * c
    return {k: v for k, v in out.items() if v != 0}


def ladder_polynomial(q, k, b):
    """phi(q, k) built by q raising steps from the normalized lowest-level state."""
    poly = {(k, 0): complex(math.sqrt(b / (2.0 * math.pi * math.factorial(k))) * (b / 2.0) ** (k / 2.0))}
    for _ in range(q):
        poly = raise_polynomial(poly, b)
    norm = math.sqrt((2.0 * b) ** q * math.factorial(q))
    return {key: c / norm for key, c in poly.items()}


def polynomial_distance(p1, p2):
    """Largest coefficient difference between two polynomial dictionaries."""
    keys = set(p1) | set(p2)
    return max((abs(p1.get(key, 0.0) - p2.get(key, 0.0)) for key in keys), default=0.0)


def phi_value(q, k, b, x, y):
    """Pointwise value of phi(q, k) at (x, y) from the closed form."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    z = x + 1j * y
    val = np.zeros(np.broadcast(x, y).shape, dtype=complex)
    for (i, j), c in explicit_polynomial(q, k, b).items():
        val = val + c * z**i * np.conj(z) ** j
    return val * np.exp(-b * (x * x + y * y) / 4.0)
