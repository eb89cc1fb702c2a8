"""Integer-argument special functions and Gauss-Laguerre quadrature."""
from __future__ import annotations

from dataclasses import dataclass
from math import fsum

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import QuadratureError

EULER_GAMMA = 0.57721566490153286061

# the recurrence for L_n loses ~1e-13 relative accuracy at order ~100
_NEWTON_RTOL = 1e-11
_GW_WEIGHT_FLOOR = 1e-6


def harmonic(n: int) -> float:
    """Return the n-th harmonic number, 1 + 1/2 + ... + 1/n (0 for n = 0)."""
    if n < 0:
        raise ValueError(f"harmonic number needs n >= 0, got {n}")
    return fsum(1.0 / k for k in range(1, n + 1))


def digamma_int(n: int) -> float:
    """Digamma at a positive integer: psi(n) = -gamma + H_{n-1}."""
    if n < 1:
        raise ValueError(f"digamma_int is defined for integers n >= 1, got {n}")
    return harmonic(n - 1) - EULER_GAMMA


def laguerre_assoc(k: int, alpha: int, x):
    """Associated Laguerre polynomial L_k^alpha(x) by three-term recurrence.

    ``x`` may be a scalar or an array; the result has the same shape.
    """
    if k < 0 or alpha < 0:
        raise ValueError(f"need k >= 0 and alpha >= 0, got k={k}, alpha={alpha}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if k == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + alpha - x
    for i in range(1, k):
        prev, cur = cur, ((2 * i + 1 + alpha - x) * cur - (i + alpha) * prev) / (i + 1)
    return cur if cur.ndim else float(cur)


def _laguerre_pair(n: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # (L_n(x), L_{n-1}(x)) with alpha = 0
    prev = np.ones_like(x)
    cur = 1.0 - x
    for i in range(1, n):
        prev, cur = cur, ((2 * i + 1 - x) * cur - i * prev) / (i + 1)
    return cur, prev


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss rule for the weight e^{-x} on [0, inf).

    The weight is built into ``weights``: integrands passed to :meth:`integrate`
    must not include the exponential factor.
    """

    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


def gauss_laguerre_rule(order: int, max_newton: int = 50) -> QuadratureRule:
    """Nodes and weights of the ``order``-point Gauss-Laguerre rule.

    Initial nodes come from the eigenvalues of the Jacobi matrix and are then
    polished by Newton iteration on L_order. Weights above 1e-6 are taken from
    the Jacobi eigenvectors, smaller ones from x / ((n+1) L_{n+1}(x))^2. Raises :class:`QuadratureError`
    when the iteration fails to converge or the weights leave the
    floating-point range, which happens once ``order`` is too large.
    """
    if order < 1:
        raise ValueError(f"quadrature order must be >= 1, got {order}")
    n = order
    i = np.arange(n)
    x, vecs = eigh_tridiagonal(2.0 * i + 1.0, np.arange(1.0, n))
    # Golub-Welsch weights are accurate in absolute terms, so they are kept
    # for the large weights; the tail uses the closed-form weight below.
    w_gw = vecs[0] ** 2

    with np.errstate(over="raise", invalid="raise"):
        try:
            for _ in range(max_newton):
                ln, lnm1 = _laguerre_pair(n, x)
                deriv = n * (ln - lnm1) / x
                step = ln / deriv
                x = x - step
                if np.all(np.abs(step) <= _NEWTON_RTOL * x):
                    # quadratic convergence: one more step reaches the rounding floor
                    ln, lnm1 = _laguerre_pair(n, x)
                    x = x - ln * x / (n * (ln - lnm1))
                    break
            else:
                raise QuadratureError(f"Newton polishing did not converge for order {order}")
            ln, lnm1 = _laguerre_pair(n, x)
            # L_{n+1}(x_i) = -n L_{n-1}(x_i) / (n+1) at a root of L_n
            lnp1 = -n * lnm1 / (n + 1)
            w = np.where(w_gw > _GW_WEIGHT_FLOOR, w_gw, x / ((n + 1) ** 2 * lnp1**2))
        except FloatingPointError as exc:
            raise QuadratureError(f"order {order} exceeds working precision") from exc

    if not (np.all(np.diff(x) > 0) and np.all(x > 0) and np.all(w > 0)):
        raise QuadratureError(f"order {order} produced an invalid rule")
    return QuadratureRule(nodes=x, weights=w, order=order)
