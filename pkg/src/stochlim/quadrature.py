"""Adaptive quadrature for complex-valued integrands on finite intervals.

This is the single integration engine used by the computational modules.
It is a plain globally-adaptive bisection scheme built on the embedded
Gauss(7)/Kronrod(15) pair; the error estimate of a panel is the difference
between the two rules.  Infinite tails are not handled here: callers truncate
using analytic Gaussian tail bounds (see ``GaussPolySum.tail_interval``) so
that the discarded mass is below a tenth of the requested tolerance.

Principal values with a simple interior pole are computed by symmetric
subtraction: on a window centred at the pole the integrand is replaced by the
difference quotient ``(h(x) - h(pole))/(x - pole)`` (whose principal value
over the symmetric window has no logarithmic term), and the remaining outer
parts are integrated directly.

The verification oracles deliberately do *not* use this module; they go
through closed forms or ``scipy.integrate`` so that the two sides of every
cross-check share no integration code.
"""

from __future__ import annotations

import heapq
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import AccuracyError, UnsupportedInputError

__all__ = [
    "QuadResult",
    "adaptive_quad",
    "fd_derivative",
    "pv_quad",
    "cauchy_integral",
]


class QuadResult(NamedTuple):
    """Integral value together with the error bound achieved."""

    value: complex
    error: float


# Kronrod-15 abscissae on [-1, 1] (non-negative half) and weights, with the
# embedded Gauss-7 weights sitting on the odd-indexed Kronrod nodes.
_XGK = np.array(
    [
        0.991455371120812639206854697526329,
        0.949107912342758524526189684047851,
        0.864864423359769072789712788640926,
        0.741531185599394439863864773280788,
        0.586087235467691130294144838258730,
        0.405845151377397166906606412076961,
        0.207784955007898467600689403773245,
        0.000000000000000000000000000000000,
    ]
)
_WGK = np.array(
    [
        0.022935322010529224963732008058970,
        0.063092092629978553290700663189204,
        0.104790010322250183839876322541518,
        0.140653259715525918745189590510238,
        0.169004726639267902826583426598550,
        0.190350578064785409913256402421014,
        0.204432940075298892414161999234649,
        0.209482141084727828012999174891714,
    ]
)
_WG = np.array(
    [
        0.129484966168869693270611432679082,
        0.279705391489276667901467771423780,
        0.381830050505118944950369775488975,
        0.417959183673469387755102040816327,
    ]
)

# full node/weight arrays on [-1, 1], ascending
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG_FULL = np.zeros_like(_WK)
_WG_FULL[1:-1:2] = np.concatenate([_WG[:-1], _WG[::-1]])


def _panel(f, a: float, b: float):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    y = np.asarray(f(mid + half * _NODES), dtype=complex)
    val = half * np.sum(_WK * y)
    val_g = half * np.sum(_WG_FULL * y)
    return val, abs(val - val_g)


def adaptive_quad(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    *,
    tol: float = 1e-11,
    breakpoints: Sequence[float] = (),
    initial_panels: int = 1,
    limit: int = 20000,
) -> QuadResult:
    """Integrate a vectorised complex integrand over the finite interval [a, b].

    Parameters
    ----------
    f : callable
        Maps an ndarray of abscissae to an ndarray of complex values.
    a, b : float
        Finite ends; ``a <= b``.
    tol : float
        Absolute tolerance on the summed panel error estimates.
    breakpoints : sequence of float
        Interior points the initial subdivision must respect (kinks,
        piece boundaries, pole-window edges).
    initial_panels : int
        Minimum number of equal panels per initial sub-interval; raise it for
        strongly oscillatory integrands so the first estimates are sane.
    limit : int
        Panel budget; exceeding it raises :class:`AccuracyError`.
    """
    if not (np.isfinite(a) and np.isfinite(b)):
        raise ValueError("adaptive_quad needs finite bounds; truncate tails first")
    if b <= a:
        return QuadResult(0.0 + 0.0j, 0.0)

    cuts = [a] + sorted(x for x in set(breakpoints) if a < x < b) + [b]
    edges = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        edges.extend(np.linspace(lo, hi, initial_panels + 1)[:-1])
    edges.append(b)

    heap = []
    counter = 0
    total_val = 0.0 + 0.0j
    total_err = 0.0
    panels = {}
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _panel(f, lo, hi)
        heapq.heappush(heap, (-err, counter, lo, hi))
        panels[counter] = (lo, val)
        total_val += val
        total_err += err
        counter += 1

    alive = {c for _, c, _, _ in heap}
    while total_err > tol and len(panels) < limit:
        neg_err, c, lo, hi = heapq.heappop(heap)
        if c not in alive:
            continue
        alive.discard(c)
        err_old = -neg_err
        val_old = panels.pop(c)[1]
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # interval at floating-point resolution; keep its estimate
            panels[c] = (lo, val_old)
            total_err -= err_old
            continue
        v1, e1 = _panel(f, lo, mid)
        v2, e2 = _panel(f, mid, hi)
        total_val += v1 + v2 - val_old
        total_err += e1 + e2 - err_old
        for seg in ((e1, lo, mid, v1), (e2, mid, hi, v2)):
            heapq.heappush(heap, (-seg[0], counter, seg[1], seg[2]))
            panels[counter] = (seg[1], seg[3])
            alive.add(counter)
            counter += 1

    # deterministic summation order: left-to-right over final panels
    value = sum(v for _, v in sorted(panels.values(), key=lambda p: p[0]))
    if total_err > tol:
        raise AccuracyError(
            f"quadrature stalled at error {total_err:.3e} > tol {tol:.3e} "
            f"on [{a:g}, {b:g}]",
            value=value,
            error=total_err,
        )
    return QuadResult(value, total_err)


def fd_derivative(f, x: float, scale: float = 0.1, levels: int = 5) -> complex:
    """Richardson-extrapolated central difference of a smooth callable.

    Used only where no analytic derivative is available (pole guards,
    numerically reduced spectral densities).
    """
    h = scale
    table = []
    for i in range(levels):
        d = (np.asarray(f(np.array([x + h]))) - np.asarray(f(np.array([x - h]))))[0]
        table.append(d / (2.0 * h))
        h *= 0.5
    # eliminate even powers of h
    for j in range(1, levels):
        fac = 4.0**j
        table = [
            (fac * table[i + 1] - table[i]) / (fac - 1.0)
            for i in range(len(table) - 1)
        ]
    return complex(table[0])


def pv_quad(
    h: Callable[[np.ndarray], np.ndarray],
    pole: float,
    a: float,
    b: float,
    *,
    tol: float = 1e-11,
    h_deriv: Callable[[np.ndarray], np.ndarray] | None = None,
    initial_panels: int = 1,
) -> QuadResult:
    """Principal value of ``h(x)/(x - pole)`` over [a, b], pole interior.

    The window ``|x - pole| <= w`` is handled by symmetric subtraction of
    ``h(pole)``; outside it the integrand is regular.  ``h_deriv`` (value of
    ``h'`` at the pole at least) removes the 0/0 at the window centre; when
    omitted it is obtained by Richardson finite differences.
    """
    margin = 1e-7 * (1.0 + abs(pole))
    if not (a + margin < pole < b - margin):
        raise UnsupportedInputError(
            f"principal-value pole {pole:g} too close to the boundary of "
            f"[{a:g}, {b:g}]"
        )
    w = min(pole - a, b - pole, 1.0)
    if h_deriv is not None:
        dp = complex(np.asarray(h_deriv(np.array([pole])), dtype=complex)[0])
    else:
        dp = fd_derivative(h, pole, scale=min(0.1, w / 4.0))
    h0 = complex(np.asarray(h(np.array([pole])), dtype=complex)[0])
    guard = 1e-7 * w

    def quotient(x):
        u = np.asarray(x) - pole
        safe = np.where(np.abs(u) < guard, 1.0, u)
        q = (np.asarray(h(x), dtype=complex) - h0) / safe
        return np.where(np.abs(u) < guard, dp, q)

    inner = adaptive_quad(
        quotient, pole - w, pole + w, tol=tol / 2.0, breakpoints=(pole,),
        initial_panels=initial_panels,
    )
    value = inner.value
    error = inner.error
    for lo, hi in ((a, pole - w), (pole + w, b)):
        if hi > lo:
            part = adaptive_quad(
                lambda x: np.asarray(h(x), dtype=complex) / (np.asarray(x) - pole),
                lo,
                hi,
                tol=tol / 4.0,
                initial_panels=initial_panels,
            )
            value += part.value
            error += part.error
    return QuadResult(value, error)


def cauchy_integral(
    h: Callable[[np.ndarray], np.ndarray],
    pole: float,
    a: float,
    b: float,
    *,
    order: int = 1,
    tol: float = 1e-11,
    h_deriv: Callable[[np.ndarray], np.ndarray] | None = None,
    h_deriv2: Callable[[np.ndarray], np.ndarray] | None = None,
    initial_panels: int = 1,
) -> QuadResult:
    """``\\int_a^b h(x)/(x - pole - i0)^order dx`` for order 1 or 2.

    For an interior pole the boundary value is evaluated by the
    Sokhotski-Plemelj split ``PV + i*pi*delta``; the second-order pole is
    first reduced by integration by parts (which requires ``h_deriv`` and
    produces boundary terms at finite ends).  A pole off ``[a, b]`` needs no
    splitting and ``h_deriv`` is then not used.  A pole within the boundary
    margin is rejected: one-sided principal values are not implemented.
    """
    if order not in (1, 2):
        raise ValueError("only first- and second-order poles are supported")
    margin = 1e-7 * (1.0 + abs(pole))
    inside = a + margin < pole < b - margin
    if not inside:
        if a - margin <= pole <= b + margin:
            raise UnsupportedInputError(
                f"pole {pole:g} sits on the boundary of the support [{a:g}, {b:g}]"
            )
        res = adaptive_quad(
            lambda x: np.asarray(h(x), dtype=complex)
            / (np.asarray(x) - pole) ** order,
            a,
            b,
            tol=tol,
            initial_panels=initial_panels,
        )
        return res

    if order == 1:
        pv = pv_quad(h, pole, a, b, tol=tol, h_deriv=h_deriv,
                     initial_panels=initial_panels)
        h0 = complex(np.asarray(h(np.array([pole])), dtype=complex)[0])
        return QuadResult(pv.value + 1j * np.pi * h0, pv.error)

    if h_deriv is None:
        raise ValueError("second-order pole reduction needs h_deriv")
    ha = complex(np.asarray(h(np.array([a])), dtype=complex)[0])
    hb = complex(np.asarray(h(np.array([b])), dtype=complex)[0])
    boundary = ha / (a - pole) - hb / (b - pole)
    inner = cauchy_integral(
        h_deriv, pole, a, b, order=1, tol=tol, h_deriv=h_deriv2,
        initial_panels=initial_panels,
    )
    return QuadResult(boundary + inner.value, inner.error)
