"""Noise-strength constants from a spectral density, by two independent routes.

All constants are boundary values of Cauchy-type integrals of the density of
states rho against poles at a resonance point.  The production route splits
every ``1/(x - x0 -/+ i0)`` via Sokhotski-Plemelj into a principal value plus
``+/- i pi rho(x0)``, with second-order poles first reduced by integration by
parts (one PV of ``rho'`` plus boundary terms at finite support ends);
principal values converge at fixed cost, so no regularisation parameter
enters the final numbers.

The cross-validation route keeps a damping parameter ``eps`` explicit: the
causal constants are time-side integrals over sigma < 0 damped by
``exp(eps sigma)``, which collapse (by Fubini, exactly, for every eps > 0) to

    integral of rho(w) / (eps + i (w - w0))^(n+1)

and the limit eps -> 0 is taken by polynomial extrapolation over a geometric
eps ladder.  For densities given in closed form the sigma-side integral is
also available verbatim (exact Gaussian algebra, no quadrature); the two
agree to rounding, which is what froze the sign conventions used throughout:
causal denominators are oriented ``x - x0 - i0``, so the delta contribution
enters with ``+ i pi``.

Full-line (non-causal) constants reduce to derivatives of rho at the
resonance:  gamma~_n = (2 pi / n!) (-i)^n rho^(n)(w0), the n-th moment of the
sigma integral against the full line; its own damped check uses a Gaussian
``exp(-eps sigma^2)`` cutoff.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import AccuracyError, CapabilityError, UnsupportedInputError
from .funcspace import GaussPoly, GaussPolySum, SpectralProfile, fourier, gaussian
from .quadrature import adaptive_quad, cauchy_integral

__all__ = [
    "NoiseCoefficients",
    "SpinBosonConstants",
    "CrossValidation",
    "DEFAULT_EPS_LADDER",
    "FULL_EPS_LADDER",
    "gamma_full",
    "gamma_full_damped",
    "gamma_causal",
    "gamma_causal_damped",
    "gamma_causal_damped_sigma",
    "cross_validate_gamma",
    "noise_coefficients",
    "spinboson_constants",
    "extrapolate_to_zero",
]

# The damped route is extrapolated over this geometric ladder.  Three points
# (0.1, 0.05, 0.025) leave an O(eps^3) residual of a few 1e-4 -- the Gaussian
# closed form pi e^{eps^2} erfc(eps) makes that explicit -- so two more
# halvings are appended to push the extrapolation error below 1e-8.
DEFAULT_EPS_LADDER = (0.1, 0.05, 0.025, 0.0125, 0.00625)

# ladder for the Gaussian-damped full-line check; the effective expansion
# variable there is eps against the squared width of the transformed density,
# so it starts smaller than the causal ladder.
FULL_EPS_LADDER = (0.04, 0.02, 0.01, 0.005, 0.0025, 0.00125)

_TAIL_TOL = 1e-15


@dataclass(frozen=True)
class NoiseCoefficients:
    """Causal and full-line constants of one multipole order."""

    order: int
    gamma: complex
    gamma_tilde: complex
    omega0: float


class CrossValidation(NamedTuple):
    route1: complex
    route2: complex

    @property
    def gap(self) -> float:
        return abs(self.route1 - self.route2)


def extrapolate_to_zero(eps: Sequence[float], values: Sequence[complex],
                        *, tol: float | None = None) -> complex:
    """Neville polynomial extrapolation of values(eps) to eps = 0.

    The difference between the last two extrapolation columns is used as a
    convergence diagnostic; if ``tol`` is given and exceeded, the
    extrapolation is declared non-convergent.
    """
    eps = [float(e) for e in eps]
    col = [complex(v) for v in values]
    n = len(eps)
    if len(col) != n or n < 2:
        raise ValueError("need matching eps/value lists with at least 2 entries")
    penultimate = col[0]
    for k in range(1, n):
        penultimate = col[0]
        col = [
            (eps[i] * col[i + 1] - eps[i + k] * col[i]) / (eps[i] - eps[i + k])
            for i in range(n - k)
        ]
    best = col[0]
    diag = abs(best - penultimate)
    if tol is not None and diag > tol:
        raise AccuracyError(
            f"eps-extrapolation not converged: last update {diag:.3e} > {tol:.3e}",
            value=best,
            error=diag,
        )
    return best


def _require_pole_clear(profile: SpectralProfile, pole: float):
    lo, hi = profile.support
    margin = 1e-7 * (1.0 + abs(pole))
    if abs(pole - lo) < margin or abs(pole - hi) < margin:
        raise UnsupportedInputError(
            f"resonance point {pole:g} sits on the support boundary of "
            f"'{profile.label}'; one-sided principal values are not supported"
        )


# ---------------------------------------------------------------------------
# full-line constants
# ---------------------------------------------------------------------------


def gamma_full(profile: SpectralProfile, omega0: float, n: int) -> complex:
    """gamma~_n = (2 pi / n!) (-i)^n rho^(n)(omega0)."""
    if n < 0:
        raise ValueError("order must be nonnegative")
    if n > profile.smoothness:
        raise CapabilityError(
            f"gamma~_{n} needs {n} derivatives of rho; profile "
            f"'{profile.label}' vouches for {profile.smoothness}"
        )
    return (2.0 * np.pi / math.factorial(n) * (-1j) ** n
            * profile.deriv_at(omega0, n))


def gamma_full_damped(profile: SpectralProfile, omega0: float, n: int,
                      eps: Sequence[float] = FULL_EPS_LADDER,
                      *, tol: float = 1e-9) -> complex:
    """Gaussian-damped sigma-side evaluation of gamma~_n, extrapolated to 0.

    For a closed-form full-line density the damped integral is exact Gaussian
    algebra; otherwise the sigma integral is folded onto the frequency axis,
    where exp(-eps sigma^2) becomes a smoothed derivative-of-delta kernel.
    """

    fact = math.factorial(n)
    mono = [0.0] * n + [1.0]
    vals = []
    if profile.is_symbolic and not np.isfinite(profile.support[0]) \
            and not np.isfinite(profile.support[1]):
        g_sigma = fourier(profile.symbolic).modulate(-omega0)
        for e in eps:
            integrand = g_sigma.times_poly(mono).times(gaussian(e))
            vals.append((-1.0) ** n / fact * integrand.integral())
    else:
        lo, hi = profile.trunc_support(_TAIL_TOL)
        for e in eps:
            kernel = fourier(gaussian(e, 0.0, mono))
            res = adaptive_quad(
                lambda w: profile.rho(np.asarray(w))
                * kernel(np.asarray(w) - omega0),
                lo,
                hi,
                tol=tol,
                breakpoints=(omega0,),
                initial_panels=8,
            )
            vals.append((-1.0) ** n / fact * res.value)
    return extrapolate_to_zero(eps, vals)


# ---------------------------------------------------------------------------
# causal constants
# ---------------------------------------------------------------------------


def gamma_causal(profile: SpectralProfile, omega0: float, n: int,
                 *, tol: float = 1e-11) -> complex:
    """Causal constants: order 0 and 1 only.

    gamma_0 = -i PV int rho/(w - w0) dw + pi rho(w0)
    gamma_1 = -(boundary terms + PV int rho'/(w - w0) dw + i pi rho'(w0))
    """
    if n < 0:
        raise ValueError("order must be nonnegative")
    if n > 1:
        raise CapabilityError(
            "causal constants are implemented for orders 0 and 1 only"
        )
    _require_pole_clear(profile, omega0)
    lo, hi = profile.trunc_support(_TAIL_TOL)
    if n == 0:
        res = cauchy_integral(
            profile.rho, omega0, lo, hi, order=1, tol=tol,
            h_deriv=profile.deriv_fn(1) if profile.smoothness >= 1 else None,
        )
        return -1j * res.value
    d1 = profile.deriv_fn(1)
    d2 = profile.deriv_fn(2) if profile.smoothness >= 2 else None
    res = cauchy_integral(
        profile.rho, omega0, lo, hi, order=2, tol=tol,
        h_deriv=d1, h_deriv2=d2,
    )
    return -res.value


def gamma_causal_damped(profile: SpectralProfile, omega0: float, n: int,
                        eps_value: float, *, tol: float = 1e-10) -> complex:
    """Single-eps damped causal constant int rho/(eps + i(w - w0))^(n+1) dw."""
    lo, hi = profile.trunc_support(_TAIL_TOL)
    res = adaptive_quad(
        lambda w: profile.rho(np.asarray(w))
        / (eps_value + 1j * (np.asarray(w) - omega0)) ** (n + 1),
        lo,
        hi,
        tol=tol,
        breakpoints=(omega0,),
        initial_panels=8,
    )
    return res.value


def gamma_causal_damped_sigma(profile: SpectralProfile, omega0: float, n: int,
                              eps_value: float) -> complex:
    """Literal sigma-side damped causal integral, exact for closed-form rho.

    ((-1)^n / n!) int_{-inf}^0 sigma^n e^{eps sigma} G(sigma) dsigma with
    G(sigma) the full-line transform of rho shifted to the resonance frame.
    Only available when that transform exists in closed form.
    """
    if not (profile.is_symbolic and not np.isfinite(profile.support[0])
            and not np.isfinite(profile.support[1])):
        raise UnsupportedInputError(
            "sigma-side damped route needs a closed-form full-line density"
        )
    g_sigma = fourier(profile.symbolic).modulate(-omega0)
    integrand = g_sigma.times_poly([0.0] * n + [1.0]).modulate(-1j * eps_value)
    return (-1.0) ** n / math.factorial(n) * integrand.integral_segment(-np.inf, 0.0)


def cross_validate_gamma(profile: SpectralProfile, omega0: float, n: int,
                         eps: Sequence[float] = DEFAULT_EPS_LADDER,
                         *, tol: float = 1e-11) -> CrossValidation:
    """Plemelj route against the damped route, with the gap between them."""
    route1 = gamma_causal(profile, omega0, n, tol=tol)
    vals = [gamma_causal_damped(profile, omega0, n, e) for e in eps]
    route2 = extrapolate_to_zero(eps, vals)
    return CrossValidation(route1, route2)


def noise_coefficients(profile: SpectralProfile, omega0: float, n: int,
                       *, tol: float = 1e-11) -> NoiseCoefficients:
    """Bundle the order-n causal and full-line constants."""
    gamma = gamma_causal(profile, omega0, n, tol=tol) if n <= 1 else complex("nan")
    return NoiseCoefficients(
        order=n,
        gamma=gamma,
        gamma_tilde=gamma_full(profile, omega0, n),
        omega0=float(omega0),
    )


# ---------------------------------------------------------------------------
# spin-boson constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SpinBosonConstants:
    """Constants (A_l, B_l, C_l, Z_l) for the two shifted branches l = 1, 2."""

    a: tuple
    b: tuple
    c: tuple
    z: tuple
    delta: float

    def __post_init__(self):
        for name in ("a", "b", "c", "z"):
            vals = tuple(complex(v) for v in getattr(self, name))
            if len(vals) != 2:
                raise ValueError("constants come in pairs (l = 1, 2)")
            object.__setattr__(self, name, vals)
        if self.delta <= 0.0:
            raise ValueError("the gap must be positive")

    @classmethod
    def assemble(cls, a, b, z, delta) -> "SpinBosonConstants":
        c = tuple(1j * ai * bi - 1j * zi for ai, bi, zi in zip(a, b, z))
        return cls(a=tuple(a), b=tuple(b), c=c, z=tuple(z), delta=float(delta))


def _z_component(profile: SpectralProfile, s: float, lo: float, hi: float,
                 *, tol: float) -> complex:
    """Double integral Z for one branch; pole at u = s and (second term) v = s.

    Split as  Z = int dv rho(v) Ja(v)  +  int dv rho(v) Jb(v) / (v - s - i0)
    with  Ja(v) = int du rho(u) / ((u + v)(u - s - i0)^2)   (second order)
    and   Jb(v) = int du rho(u) / ((u + v)(u - s - i0)).
    The inner poles are Plemelj-split per outer node; the outer integral of
    the second term is itself a Cauchy boundary value with a smooth complex
    numerator.  Requires rho supported on w > 0 so u + v never vanishes.
    """
    rho = profile.rho
    drho = profile.deriv_fn(1)
    inner_tol = tol

    def ja(v: float) -> complex:
        def h(u):
            return rho(np.asarray(u)) / (np.asarray(u) + v)

        def dh(u):
            u = np.asarray(u)
            return drho(u) / (u + v) - rho(u) / (u + v) ** 2

        return cauchy_integral(h, s, lo, hi, order=2, tol=inner_tol,
                               h_deriv=dh).value

    def jb(v: float) -> complex:
        def h(u):
            return rho(np.asarray(u)) / (np.asarray(u) + v)

        def dh(u):
            u = np.asarray(u)
            return drho(u) / (u + v) - rho(u) / (u + v) ** 2

        return cauchy_integral(h, s, lo, hi, order=1, tol=inner_tol,
                               h_deriv=dh).value

    def term_a_outer(v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        return rho(v) * np.array([ja(x) for x in v])

    term_a = adaptive_quad(term_a_outer, lo, hi, tol=tol).value

    def numerator_b(v):
        v = np.atleast_1d(np.asarray(v, dtype=float))
        return rho(v) * np.array([jb(x) for x in v])

    term_b = cauchy_integral(numerator_b, s, lo, hi, order=1, tol=tol).value
    return term_a + term_b


def spinboson_constants(profile: SpectralProfile, delta: float,
                        *, tol: float = 1e-9) -> SpinBosonConstants:
    """A_l, B_l, Z_l (and C_l by composition) for the gap ``delta``.

    The two branches shift the pole to +delta and -delta; the second branch
    must stay off the support, which is also required to sit in w > 0 so the
    u + v denominator of Z never vanishes.
    """
    if delta <= 0.0:
        raise ValueError("the gap must be positive")
    if profile.support[0] < 0.0:
        raise UnsupportedInputError(
            "spin-boson constants need the density supported in w >= 0, "
            "so the u + v denominator of Z never vanishes"
        )
    lo, hi = profile.trunc_support(_TAIL_TOL)
    a_vals = []
    b_vals = []
    z_vals = []
    d1 = profile.deriv_fn(1)
    d2 = profile.deriv_fn(2) if profile.smoothness >= 2 else None
    for s in (delta, -delta):
        if lo - 1e-7 < s < hi + 1e-7:
            _require_pole_clear(profile, s)
        a_vals.append(cauchy_integral(profile.rho, s, lo, hi, order=1,
                                      tol=tol, h_deriv=d1).value)
        b_vals.append(cauchy_integral(profile.rho, s, lo, hi, order=2,
                                      tol=tol, h_deriv=d1, h_deriv2=d2).value)
        z_vals.append(_z_component(profile, s, lo, hi, tol=tol))
    return SpinBosonConstants.assemble(a_vals, b_vals, z_vals, delta)
