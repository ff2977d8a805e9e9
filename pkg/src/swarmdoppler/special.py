"""Integer-order Bessel functions of the first kind and phase-average oracles.

Evaluation runs a single downward three-term recurrence (Miller's algorithm)
started well above both the order and the argument, normalised with the
squared-sum identity

    J_0(x)^2 + 2 * sum_{k>=1} J_k(x)^2 = 1,

whose terms are all nonnegative, so normalisation cannot lose digits to
cancellation; the overall sign comes from J_0(x) + 2*sum J_{2k}(x) = 1.
Intermediate growth is tamed with exact power-of-two rescaling, so rescaling
itself never rounds; per-order shift counts are kept so early-captured
orders survive later rescales without underflow.

This is stable straight across the order-equals-argument turning point,
which is exactly where the series truncation of the swarm model lives.
Measured against 40-digit references, relative error stays below ~1e-13
throughout the supported envelope except within a few ulps of an isolated
zero of an oscillatory-regime J_n, where relative error degrades while the
absolute error stays near 1e-13 times the local envelope.

Supported envelope: integer order 0 <= n <= 3000 and |x| <= 2000.  Outside
it, calls refuse with DomainError rather than silently degrade.
"""
from __future__ import annotations

import math

import numpy as np

from .exceptions import DomainError, NumericsError

MAX_ORDER = 3000
MAX_ABS_ARG = 2000.0

_SHIFT = 500
_BIG = 2.0 ** _SHIFT
_SMALL = 2.0 ** (-_SHIFT)
_TINY_ARG = 1e-100
# i**n for n mod 4; complex integer powers drift for large n, a table does not
_IPOW = (1 + 0j, 1j, -1 + 0j, -1j)


def _check_order(n) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise DomainError(f"order must be an integer, got {n!r}")
    if not 0 <= n <= MAX_ORDER:
        raise DomainError(f"order {n} outside supported range [0, {MAX_ORDER}]")
    return int(n)


def _start_order(n: int, x: float) -> int:
    # Enough headroom that the minimal-solution contamination decays below
    # 1e-16 before the recurrence reaches order n, including the Airy
    # transition zone around order ~ argument.
    return int(max(n, math.ceil(x))) + max(40, int(math.ceil(10.0 * x ** (1.0 / 3.0))))


def _tiny_arg_column(n_max: int, x: float) -> np.ndarray:
    # Leading series term only; for x < 1e-100 the relative truncation error
    # is below x**2/4 ~ 1e-200.
    out = np.zeros(n_max + 1)
    out[0] = 1.0
    half = x / 2.0
    if half == 0.0:   # subnormal halving underflow: positive orders vanish
        return out
    logx2 = math.log(half)
    for k in range(1, n_max + 1):
        logv = k * logx2 - math.lgamma(k + 1.0)
        if logv < -745.0:
            break
        out[k] = math.exp(logv)
    return out


def bessel_j_many(n_max: int, x: float) -> np.ndarray:
    """J_0(x) .. J_{n_max}(x) in one downward pass at scalar ``x``."""
    n_max = _check_order(n_max)
    x = float(x)
    if not math.isfinite(x) or abs(x) > MAX_ABS_ARG:
        raise DomainError(f"argument {x!r} outside supported range |x| <= {MAX_ABS_ARG}")
    ax = abs(x)
    if ax == 0.0:
        out = np.zeros(n_max + 1)
        out[0] = 1.0
        return out
    if ax < _TINY_ARG:
        out = _tiny_arg_column(n_max, ax)
    else:
        top = _start_order(n_max, ax)
        out = np.zeros(n_max + 1)
        cap_shift = np.zeros(n_max + 1, dtype=np.int64)
        two_over_x = 2.0 / ax
        fk1 = 0.0
        fk = 1.0
        sq = 0.0
        lin = 0.0
        shifts = 0
        for k in range(top, 0, -1):
            if k <= n_max:
                out[k] = fk
                cap_shift[k] = shifts
            sq += 2.0 * fk * fk
            if not k & 1:
                lin += 2.0 * fk
            fk1, fk = fk, (two_over_x * k) * fk - fk1
            if abs(fk) > _BIG:
                fk *= _SMALL
                fk1 *= _SMALL
                sq *= _SMALL * _SMALL
                lin *= _SMALL
                shifts += 1
        out[0] = fk
        cap_shift[0] = shifts
        sq += fk * fk
        lin += fk
        norm = math.sqrt(sq) if lin >= 0.0 else -math.sqrt(sq)
        out = np.ldexp(out / norm, (_SHIFT * (cap_shift - shifts)).astype(np.int32))
    if x < 0.0:
        out[1::2] = -out[1::2]
    return out


def _bessel_vector(n: int, ax: np.ndarray) -> np.ndarray:
    """J_n over an array of nonnegative arguments."""
    out = np.zeros_like(ax)
    zero = ax == 0.0
    tiny = ~zero & (ax < _TINY_ARG)
    main = ~(zero | tiny)
    if n == 0:
        out[zero] = 1.0
    if tiny.any():
        if n == 0:
            out[tiny] = 1.0
        else:
            half = ax[tiny] / 2.0
            with np.errstate(divide="ignore"):
                logv = n * np.log(half) - math.lgamma(n + 1.0)
            out[tiny] = np.where(logv < -745.0, 0.0, np.exp(logv))
    if main.any():
        xm = ax[main]
        top = _start_order(n, float(xm.max()))
        inv_x = 1.0 / xm
        fk1 = np.zeros_like(xm)
        fk = np.ones_like(xm)
        sq = np.zeros_like(xm)
        lin = np.zeros_like(xm)
        shifts = np.zeros(xm.shape, dtype=np.int64)
        cap = np.zeros_like(xm)
        cap_shift = np.zeros(xm.shape, dtype=np.int64)
        for k in range(top, 0, -1):
            if k == n:
                cap[:] = fk
                cap_shift[:] = shifts
            sq += 2.0 * fk * fk
            if not k & 1:
                lin += 2.0 * fk
            fk1, fk = fk, (2.0 * k) * inv_x * fk - fk1
            big = np.abs(fk) > _BIG
            if big.any():
                fk[big] *= _SMALL
                fk1[big] *= _SMALL
                sq[big] *= _SMALL * _SMALL
                lin[big] *= _SMALL
                shifts[big] += 1
        sq += fk * fk
        lin += fk
        if n == 0:
            cap[:] = fk
            cap_shift[:] = shifts
        norm = np.where(lin >= 0.0, 1.0, -1.0) * np.sqrt(sq)
        out[main] = np.ldexp(cap / norm, (_SHIFT * (cap_shift - shifts)).astype(np.int32))
    return out


def bessel_j(n: int, x):
    """Bessel function of the first kind, integer order.

    ``x`` may be a scalar or an ndarray; the return type matches.  Orders
    0..3000 and |x| <= 2000 are supported.
    """
    n = _check_order(n)
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(np.abs(arr) > MAX_ABS_ARG):
        raise DomainError(f"argument outside supported range |x| <= {MAX_ABS_ARG}")
    if arr.ndim == 0:
        return float(bessel_j_many(n, float(arr))[n])
    vals = _bessel_vector(n, np.abs(arr).ravel()).reshape(arr.shape)
    if n & 1:
        vals = np.where(arr < 0.0, -vals, vals)
    return vals


def squared_bessel_sum_check(z: float, n_terms: int) -> float:
    """Partial sum J_0(z)^2 + 2*sum_{k=1..n_terms} J_k(z)^2.

    Approaches 1 from below as ``n_terms`` grows; used as a convergence and
    normalisation oracle for the squared-coefficient family.
    """
    z = float(z)
    if z < 0.0:
        raise DomainError(f"z must be >= 0, got {z!r}")
    col = bessel_j_many(n_terms, z)
    return float(col[0] ** 2 + 2.0 * np.sum(col[1:] ** 2))


def bessel_phase_average(n: int, size: float, *, tol: float = 1e-11) -> float:
    """Average of J_n(size * sin(phi)) over phi uniform on [0, 2*pi).

    Evaluated as (1 / (2*pi*i**n)) * integral over a full period of
    J_0(size*cos(t)) * exp(i*n*t), by trapezoid quadrature with doubling
    resolution.  The integrand is smooth and periodic, so the rule converges
    geometrically and the change between successive refinements bounds the
    error; the result is real, with the imaginary residue checked against
    ``tol`` internally.
    """
    n = _check_order(n)
    size = float(size)
    if not 0.0 < size <= MAX_ABS_ARG:
        raise DomainError(f"size must be in (0, {MAX_ABS_ARG}], got {size!r}")
    # spectral accuracy needs the sample count past the integrand's harmonic
    # content, roughly size + n
    npts = 64
    while npts < 3.0 * (size + n) + 32.0:
        npts *= 2
    prev = None
    while npts <= (1 << 22):
        theta = (2.0 * np.pi / npts) * np.arange(npts)
        samples = bessel_j(0, size * np.cos(theta)) * np.exp(1j * n * theta)
        cur = complex(samples.mean() * 2.0 * np.pi)
        if prev is not None and abs(cur - prev) <= 0.5 * tol:
            coeff = cur / (2.0 * np.pi * _IPOW[n % 4])
            if abs(coeff.imag) > tol:
                raise NumericsError(
                    f"phase-average quadrature left imaginary residue {coeff.imag:.3e}"
                )
            return float(coeff.real)
        prev = cur
        npts *= 2
    raise NumericsError(
        f"phase-average quadrature did not converge to tol={tol:g}; "
        f"last refinement changed the value by {abs(cur - prev):.3e}"
    )


def bessel_phase_average_closed(n: int, size: float) -> float:
    """Closed form of the even-order phase average: J_{n/2}(size/2)**2.

    Odd orders average to exactly zero and are rejected here.  The closed
    form was reconciled against :func:`bessel_phase_average` numerically
    across orders and sizes before being adopted, and the two routes are
    kept independent so either can check the other.
    """
    n = _check_order(n)
    if n & 1:
        raise DomainError(f"closed form exists for even orders only, got n={n}")
    size = float(size)
    if not 0.0 < size <= MAX_ABS_ARG:
        raise DomainError(f"size must be in (0, {MAX_ABS_ARG}], got {size!r}")
    return float(bessel_j(n // 2, size / 2.0) ** 2)
