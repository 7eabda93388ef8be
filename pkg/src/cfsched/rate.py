"""Computation rates of the real-valued compute-and-forward channel.

A relay observing ``y = sum_l h_l x_l + z`` decodes the integer combination
``sum_l a_l x_l``.  With MMSE scaling the achievable computation rate is

    R(h, a) = 1/2 log2+ ( ||a||^2 - P (h.a)^2 / (1 + P ||h||^2) )^-1

which is a monotone function of the quadratic form ``f(a) = a^T G a`` with
``G = (1 + P||h||^2) I - P h h^T``.  Rates are in bits per real channel use.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "as_channel",
    "as_coeffs",
    "gram_matrix",
    "quad_form",
    "alpha_mmse",
    "computation_rate",
    "computation_rate_alpha",
    "rate_upper_bound",
    "log2_plus",
]


def as_channel(h) -> np.ndarray:
    """Validate a channel vector and return it as a 1-D float array."""
    h = np.asarray(h, dtype=float)
    if h.ndim != 1 or h.size == 0:
        raise InvalidInputError("channel vector must be 1-D and non-empty")
    if not np.all(np.isfinite(h)):
        raise InvalidInputError("channel vector must be finite")
    return h


def as_coeffs(a, length: int | None = None) -> np.ndarray:
    """Validate an integer coefficient vector and return it as int64."""
    arr = np.asarray(a)
    if arr.ndim != 1 or arr.size == 0:
        raise InvalidInputError("coefficient vector must be 1-D and non-empty")
    if arr.dtype.kind == "f":
        if not np.all(np.isfinite(arr)) or np.any(arr != np.round(arr)):
            raise InvalidInputError("coefficient vector must be integer valued")
    elif arr.dtype.kind not in "iub":
        raise InvalidInputError("coefficient vector must be integer valued")
    arr = arr.astype(np.int64)
    if length is not None and arr.size != length:
        raise InvalidInputError(
            f"dimension mismatch: coefficients have length {arr.size}, channel {length}"
        )
    return arr


def _check_power(P: float, allow_zero: bool = False) -> float:
    P = float(P)
    if not np.isfinite(P) or P < 0 or (P == 0 and not allow_zero):
        raise InvalidInputError(f"power must be positive, got {P}")
    return P


def log2_plus(x):
    """``max(log2(x), 0)``; non-positive arguments map to 0."""
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(x > 1.0, np.log2(np.where(x > 0, x, 1.0)), 0.0)
    return out if out.ndim else float(out)


def gram_matrix(h, P: float) -> np.ndarray:
    """Return ``(1 + P||h||^2) I - P h h^T``."""
    h = as_channel(h)
    P = _check_power(P)
    L = h.size
    return (1.0 + P * (h @ h)) * np.eye(L) - P * np.outer(h, h)


def quad_form(h, P: float, a) -> float:
    """Quadratic form ``a^T G a`` via ``||a||^2 + P(||a||^2 ||h||^2 - (a.h)^2)``.

    ``P = 0`` is accepted and gives ``||a||^2``.  The Cauchy-Schwarz term is
    clamped at zero so rounding cannot push the result below ``||a||^2``.
    """
    h = as_channel(h)
    a = as_coeffs(a, h.size).astype(float)
    P = _check_power(P, allow_zero=True)
    na = a @ a
    cs = na * (h @ h) - (a @ h) ** 2
    return float(na + P * max(cs, 0.0))


def alpha_mmse(h, a, P: float) -> float:
    """MMSE scaling ``P h.a / (1 + P||h||^2)``."""
    h = as_channel(h)
    a = as_coeffs(a, h.size)
    P = _check_power(P)
    return float(P * (h @ a) / (1.0 + P * (h @ h)))


def computation_rate(h, a, P: float) -> float:
    """Computation rate of coefficient vector ``a`` over channel ``h``.

    Raises
    ------
    InvalidInputError
        If ``a`` is all-zero or dimensions disagree.
    """
    h = as_channel(h)
    a = as_coeffs(a, h.size)
    if not np.any(a):
        raise InvalidInputError("coefficient vector must not be all-zero")
    P = _check_power(P)
    # x = f(a) / (1 + P||h||^2) >= ||a||^2 / (1 + P||h||^2) > 0
    x = quad_form(h, P, a) / (1.0 + P * (h @ h))
    return float(0.5 * log2_plus(1.0 / x))


def computation_rate_alpha(h, a, P: float, alpha: float) -> float:
    """Rate ``1/2 log2+ (P / (alpha^2 + P||alpha h - a||^2))`` for a given scaling."""
    h = as_channel(h)
    a = as_coeffs(a, h.size)
    P = _check_power(P)
    r = alpha * h - a
    denom = alpha * alpha + P * (r @ r)
    if denom <= 0:
        raise InvalidInputError("alpha = 0 with a = 0 gives an undefined rate")
    return float(0.5 * log2_plus(P / denom))


def rate_upper_bound(h, P: float) -> float:
    """Universal ceiling ``1/2 log2(1 + P max_i h_i^2)`` on any computation rate."""
    h = as_channel(h)
    P = _check_power(P)
    return float(0.5 * np.log2(1.0 + P * np.max(h * h)))
