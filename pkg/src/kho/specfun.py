"""Special-function kernel: integer-order Bessel functions, Graf-geometry
helpers, and displacement-operator matrix elements.

Everything here is a pure function of its arguments.  Bessel values are
produced by Miller's downward recurrence normalized with the even-order sum
rule, which is stable in the large-order regime the coefficient maps live in
(orders well past the turning point).  Displacement matrix elements use the
associated-Laguerre closed form with factorial ratios carried in log space,
so they remain finite at orders of a few thousand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import gammaln

__all__ = [
    "bessel_table",
    "bessel_j",
    "k_cutoff",
    "GrafGeometry",
    "graf_geometry",
    "graf_sum",
    "displacement_element",
    "displacement_matrix",
    "coherent_fock",
]

_RESCALE = 1e250


@dataclass(frozen=True)
class GrafGeometry:
    """Triangle data (zeta', chi) for Graf's addition theorem with equal
    Bessel arguments zeta and relative angle alpha in [0, pi]."""

    zeta: float
    alpha: float
    zeta_prime: float
    chi: float


def _miller_table(x: float, order_max: int) -> np.ndarray:
    """J_0(x)..J_order_max(x) by downward recurrence, x > 0."""
    # Start far enough above both the requested order and the turning point
    # that the contaminating (Neumann) component has died off.
    start = max(order_max, int(math.ceil(x))) + 40 + 2 * int(math.sqrt(max(order_max, x) + 1))
    jp = 0.0  # J_{n+1}, seeded at order start+1
    j = 1e-300  # J_n, seeded at order start
    vals_out = np.zeros(order_max + 1)
    # even-order sum rule accumulator: J_0 + 2*sum_{k>=1} J_2k = 1
    total = 2.0 * j if start % 2 == 0 else 0.0
    for n in range(start, 0, -1):
        jp, j = j, (2.0 * n / x) * j - jp  # j becomes J_{n-1}
        m = n - 1
        if abs(j) > _RESCALE:
            j /= _RESCALE
            jp /= _RESCALE
            total /= _RESCALE
            vals_out[m:] /= _RESCALE
        if m <= order_max:
            vals_out[m] = j
        if m % 2 == 0:
            total += j if m == 0 else 2.0 * j
    return vals_out / total


@lru_cache(maxsize=512)
def _cached_table(x: float, order_max: int) -> np.ndarray:
    if x == 0.0:
        out = np.zeros(order_max + 1)
        out[0] = 1.0
    else:
        out = _miller_table(abs(x), order_max)
        if x < 0.0:
            out[1::2] *= -1.0
    out.flags.writeable = False
    return out


def bessel_table(x: float, order_max: int) -> np.ndarray:
    """Return [J_0(x), ..., J_order_max(x)] as a read-only array.

    Cached per (x, order_max); safe for concurrent read.
    """
    if not math.isfinite(x):
        raise ValueError(f"Bessel argument must be finite, got {x}")
    if order_max < 0:
        raise ValueError("order_max must be nonnegative")
    return _cached_table(float(x), int(order_max))


def bessel_j(n: int, x: float) -> float:
    """Integer-order cylindrical Bessel function J_n(x).

    Negative orders resolve through J_{-n}(x) = (-1)^n J_n(x).
    """
    n = int(n)
    table = bessel_table(x, abs(n))
    val = table[abs(n)]
    if n < 0 and n % 2 != 0:
        val = -val
    return float(val)


@lru_cache(maxsize=512)
def k_cutoff(zeta: float, tol: float = 1e-14) -> int:
    """Smallest k with |J_k(zeta)| < tol; truncation bound for all k-sums.

    The super-exponential decay past the turning point makes this a uniform
    tail bound: |J_k(zeta)| < tol for every k >= k_cutoff(zeta).
    """
    if zeta == 0.0:
        return 1
    guess = int(abs(zeta)) + 60
    table = bessel_table(zeta, guess)
    below = np.nonzero(np.abs(table) < tol)[0]
    for k in below:
        if np.all(np.abs(table[k:]) < tol):
            return int(k)
    raise RuntimeError(f"no cutoff below tol={tol} found for zeta={zeta}")


def bessel_range(zeta: float, k_lo: int, k_hi: int) -> np.ndarray:
    """J_k(zeta) for k = k_lo..k_hi inclusive (negative orders via parity)."""
    top = max(abs(k_lo), abs(k_hi))
    table = bessel_table(zeta, top)
    ks = np.arange(k_lo, k_hi + 1)
    vals = table[np.abs(ks)].copy()
    odd_neg = (ks < 0) & (ks % 2 != 0)
    vals[odd_neg] *= -1.0
    return vals


def graf_geometry(zeta: float, alpha: float) -> GrafGeometry:
    """Resolve (zeta', chi) from the triangle construction behind Graf's
    theorem for two equal arguments.

    zeta' = zeta * sqrt(2 [1 - cos(alpha)]) is the defining relation; chi is
    the two-argument arctangent of (zeta sin(alpha), zeta [1 - cos(alpha)]),
    which lands in [0, pi/2] for alpha in [0, pi].
    """
    if not math.isfinite(zeta):
        raise ValueError("zeta must be finite")
    if not 0.0 <= alpha <= math.pi:
        raise ValueError(f"alpha must lie in [0, pi], got {alpha}")
    zeta_prime = zeta * math.sqrt(2.0 * (1.0 - math.cos(alpha)))
    chi = math.atan2(abs(zeta) * math.sin(alpha), abs(zeta) * (1.0 - math.cos(alpha)))
    return GrafGeometry(zeta=zeta, alpha=alpha, zeta_prime=zeta_prime, chi=chi)


def graf_sum(n: int, zeta: float, alpha: float, k_max: int | None = None) -> complex:
    """Truncated sum_{k} J_{n+k}(zeta) J_k(zeta) e^{i k alpha}.

    Equals J_n(zeta') e^{i n chi} with (zeta', chi) = graf_geometry(zeta,
    alpha); the default k_max keeps every dropped term below 1e-15.
    """
    if k_max is None:
        k_max = k_cutoff(zeta, 1e-15) + abs(n)
    ks = np.arange(-k_max, k_max + 1)
    jk = bessel_range(zeta, -k_max, k_max)
    jnk = bessel_range(zeta, n - k_max, n + k_max)
    return complex(np.sum(jnk * jk * np.exp(1j * ks * alpha)))


def displacement_element(m: int, n: int, alpha: complex) -> complex:
    """Exact matrix element <m|D(alpha)|n> of the displacement operator.

    Associated-Laguerre closed form; the recurrence runs over the lower
    index with periodic rescaling, prefactors in log space.  Stable for
    |alpha|^2 up to ~1e3 at orders of a few thousand.
    """
    if m < 0 or n < 0:
        raise ValueError("Fock indices must be nonnegative")
    alpha = complex(alpha)
    if alpha == 0:
        return 1.0 + 0.0j if m == n else 0.0 + 0.0j
    if m < n:
        # <m|D(a)|n> = conj(<n|D(-a)|m>)
        return displacement_element(n, m, -alpha).conjugate()
    d = m - n
    x = abs(alpha) ** 2
    # L_k^{(d)}(x), k = 0..n, with running log-scale
    lk_m1, lk = 0.0, 1.0
    logscale = 0.0
    for k in range(1, n + 1):
        lk_m1, lk = lk, ((2 * k - 1 + d - x) * lk - (k - 1 + d) * lk_m1) / k
        if abs(lk) > _RESCALE:
            lk /= _RESCALE
            lk_m1 /= _RESCALE
            logscale += math.log(_RESCALE)
    logpref = 0.5 * (math.lgamma(n + 1) - math.lgamma(m + 1)) + d * math.log(abs(alpha)) - 0.5 * x
    phase = (alpha / abs(alpha)) ** d
    return phase * lk * math.exp(logpref + logscale)


def displacement_matrix(alpha: complex, dim: int) -> np.ndarray:
    """Dense dim x dim matrix of exact displacement elements <m|D(alpha)|n>.

    One pass of the Laguerre recurrence over the lower index, vectorized
    across diagonal offsets, fills both triangles.
    """
    alpha = complex(alpha)
    if alpha == 0:
        return np.eye(dim, dtype=complex)
    x = abs(alpha) ** 2
    out = np.empty((dim, dim), dtype=complex)
    offs = np.arange(dim)
    lg = gammaln(np.arange(dim) + 1.0)
    unit = alpha / abs(alpha)
    phase_up = unit ** offs
    phase_dn = (-np.conj(unit)) ** offs
    lk_m1 = np.zeros(dim)
    lk = np.ones(dim)
    logscale = np.zeros(dim)
    log_a = math.log(abs(alpha))
    for n in range(dim):
        if n > 0:
            lk_m1, lk = lk, ((2 * n - 1 + offs - x) * lk - (n - 1 + offs) * lk_m1) / n
            big = np.abs(lk) > _RESCALE
            if big.any():
                lk[big] /= _RESCALE
                lk_m1[big] /= _RESCALE
                logscale[big] += math.log(_RESCALE)
        width = dim - n
        d = offs[:width]
        logpref = 0.5 * (lg[n] - lg[n + d]) + d * log_a - 0.5 * x
        mag = np.exp(logpref + logscale[:width]) * lk[:width]
        out[n + d, n] = mag * phase_up[:width]
        out[n, n + d] = mag * phase_dn[:width]
    return out


def coherent_fock(alpha: complex, dim: int) -> np.ndarray:
    """Number-basis amplitudes of the coherent state |alpha>, truncated at dim.

    Equivalent to column 0 of displacement_matrix but computed directly in
    log space: c_n = e^{-|a|^2/2} a^n / sqrt(n!).
    """
    alpha = complex(alpha)
    out = np.zeros(dim, dtype=complex)
    if alpha == 0:
        out[0] = 1.0
        return out
    n = np.arange(dim)
    logmag = -0.5 * abs(alpha) ** 2 + n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1.0)
    np.exp(logmag, out=logmag)
    out[:] = logmag * np.exp(1j * n * np.angle(alpha))
    return out
