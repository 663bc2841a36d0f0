r"""Modified Bessel function of the first kind, order one.

Two independent routes are provided: the power series

.. math:: I_1(z) = \sum_k \frac{(z/2)^{2k+1}}{k!\,(k+1)!}

and the integral representation

.. math:: I_1(z) = \frac{z}{\pi}\int_0^\pi e^{z\cos\xi}\sin^2\xi\,d\xi .

The integral is evaluated in the scaled form
:math:`J(z) = \int_0^\pi e^{-z(1-\cos\xi)}\sin^2\xi\,d\xi = \pi e^{-z} I_1(z)/z`,
which never overflows and is what the convolution solvers integrate.
"""
from __future__ import annotations

import numpy as np

from .scales import DomainError

XI_ORDER = 64
_GL_X, _GL_W = np.polynomial.legendre.leggauss(XI_ORDER)
# exp(-z (1 - cos xi)) < exp(-_CUTOFF) beyond the truncation angle
_CUTOFF = 80.0
SERIES_TERMS = 40


def _as_nonneg(z):
    z = np.asarray(z, dtype=float)
    if np.any(z < 0) or np.any(np.isnan(z)):
        raise DomainError("Bessel argument must be real and non-negative")
    return z


def _ret(z, value):
    return float(value) if np.ndim(z) == 0 else value


def xi_integral(z):
    """J(z) = int_0^pi exp(-z (1 - cos xi)) sin^2 xi dxi, vectorised over ``z``.

    For large ``z`` the integrand is confined to a boundary layer of width
    ~ z**-0.5 at xi = 0, so the fixed Gauss-Legendre rule is applied on a
    truncated interval where the exponential factor exceeds exp(-80).
    """
    z = _as_nonneg(z)
    s = np.sqrt(np.minimum(1.0, _CUTOFF / (2.0 * np.maximum(z, 1e-300))))
    xi_max = 2.0 * np.arcsin(s)
    half = 0.5 * xi_max[..., None]
    xi = half * (_GL_X + 1.0)
    sh = np.sin(0.5 * xi)
    f = np.exp(-2.0 * z[..., None] * sh * sh) * np.sin(xi) ** 2
    return _ret(z, half[..., 0] * (f @ _GL_W))


def i1_series(z, terms: int = SERIES_TERMS):
    """Power series of I_1 truncated after ``terms`` terms."""
    z = _as_nonneg(z)
    h = 0.5 * z
    h2 = h * h
    term = h.copy()
    total = term.copy()
    for k in range(terms - 1):
        term = term * h2 / ((k + 1) * (k + 2))
        total = total + term
    return _ret(z, total)


def i1e_integral(z):
    """exp(-z) I_1(z) from the integral representation."""
    z = _as_nonneg(z)
    return _ret(z, z * np.asarray(xi_integral(z)) / np.pi)


def bessel_i1(z, method: str = "integral"):
    """I_1(z) for real z >= 0 via ``"integral"`` or ``"series"``."""
    z = _as_nonneg(z)
    if method == "series":
        return i1_series(z)
    if method != "integral":
        raise ValueError(f"unknown method {method!r}")
    with np.errstate(over="ignore"):
        return _ret(z, np.exp(z) * np.asarray(i1e_integral(z)))


def bessel_i1e(z):
    """Exponentially scaled exp(-z) I_1(z).

    Series below z = 30 (all terms positive, so no cancellation), the
    truncated integral representation above.
    """
    z = _as_nonneg(z)
    small = z <= 30.0
    out = np.empty_like(z)
    out[small] = np.asarray(i1_series(z[small])) * np.exp(-z[small])
    out[~small] = np.asarray(i1e_integral(z[~small]))
    return _ret(z, out)
