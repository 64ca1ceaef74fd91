"""Chebyshev polynomials X_m with X_m(2 cos(pi t)) = sin((m+1) pi t) / sin(pi t).

These are the Hecke polynomials: for a normalized eigenform,
a(p^m) = X_m(a(p)). The three-term recurrence X_m = u X_{m-1} - X_{m-2}
with X_0 = 1, X_1 = u is used throughout; X_{-1} = 0 is the natural
continuation and is accepted so that identities with a(p^{-1}) terms read
cleanly.
"""

from __future__ import annotations

import numpy as np


def chebyshev_X(m: int, u):
    """Evaluate X_m at ``u`` (scalar or array)."""
    if m < -1:
        raise ValueError("X_m is defined for m >= -1")
    u = np.asarray(u, dtype=float)
    if m == -1:
        return np.zeros_like(u)[()]
    prev, cur = np.zeros_like(u), np.ones_like(u)
    for _ in range(m):
        prev, cur = cur, u * cur - prev
    return cur[()]


def chebyshev_X_table(m_max: int, u) -> np.ndarray:
    """Rows X_0(u), ..., X_{m_max}(u); shape ``(m_max + 1,) + u.shape``."""
    u = np.asarray(u, dtype=float)
    out = np.empty((m_max + 1,) + u.shape)
    out[0] = 1.0
    if m_max >= 1:
        out[1] = u
    for m in range(2, m_max + 1):
        out[m] = u * out[m - 1] - out[m - 2]
    return out


def chebyshev_X_int(m: int, a: int, scale: int) -> int:
    """Exact integer analogue: eigenvalue of T_{p^m} in terms of that of T_p.

    With ``a`` the unnormalized eigenvalue c(p) and ``scale`` = p^(k-1), the
    Hecke recursion c(p^{m+1}) = c(p) c(p^m) - p^(k-1) c(p^{m-1}) gives
    c(p^m) exactly.
    """
    prev, cur = 0, 1
    for _ in range(m):
        prev, cur = cur, a * cur - scale * prev
    return cur
