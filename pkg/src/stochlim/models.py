"""Closed-form weak-coupling results for the three system-reservoir models.

Vacuum expectations of the rescaled evolution operator reduce to matrix
expressions built from the noise constants:

* linear model (scalar coupling operator): the exact exponential
  exp(A t + lam^2 B + lam^2 C(t/lam^2)) with A = -gamma_0 |D|^2,
  B = gamma_1 |D|^2 and a decaying kernel C, plus its truncated form
  exp(-gamma_0 t |D|^2) (1 + lam^2 gamma_1 |D|^2).
* matrix model under the co-rotating coupling condition: the same bracket
  plus a factorially convergent operator series, truncated with a certified
  tail bound.
* spin-flip (two-level, no co-rotating condition): projections DD+ and D+D
  evolve with scalar phases i A_l; the lam^2 correction solves a linear
  matrix ODE whose closed-form solution is also implemented, so the
  integrator and the formula check each other.

Vacuum projections of the normally ordered evolution equations close on the
system matrices alone: the noise terms act one-sidedly on the vacuum, so the
order-0 expectation obeys  d<U_0>/dt = -gamma_0 D+D <U_0>  and the order-1
expectation obeys the same homogeneous equation with zero initial data,
making it identically zero.  That is why the leading corrections downstream
start at lam^2.

The independent oracle for the linear model is the second-cumulant identity:
the coupling is linear in the field, so the vacuum amplitude is exactly
exp(-|D|^2 lam^2 II(t/lam^2)) with II(T) = int_0^T (T - s) G(s) ds and G the
autocorrelation of the smeared field.  No extra phase appears; this was
pinned against an exact two-mode propagation (see the oracle module) before
the identity was frozen here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm
from scipy.special import gammainc

from .coeffs import SpinBosonConstants, gamma_causal, gamma_full
from .errors import AccuracyError, CapabilityError, UnsupportedInputError
from .funcspace import GaussPolySum, SpectralProfile, fourier
from .quadrature import adaptive_quad, cauchy_integral

__all__ = [
    "SystemModel",
    "VacuumExpectation",
    "SPIN_BOSON_D",
    "c_of_t",
    "LinearAbc",
    "linear_abc",
    "cumulant_oracle",
    "autocorrelation_kernel",
    "rwa_matrix_vacuum",
    "u0_vacuum",
    "u1_vacuum",
    "spinboson_u0",
    "spinboson_correction_ode",
    "spinboson_correction_closed",
    "multipole_pairing_term",
    "smeared_two_point",
]

SPIN_BOSON_D = 0.5 * np.array([[1.0, 1.0], [-1.0, -1.0]], dtype=complex)

_TAIL_TOL = 1e-15


@dataclass(frozen=True, eq=False)
class SystemModel:
    """An N-level system coupled to a reservoir through matrices D, D+."""

    kind: str
    d: np.ndarray
    d_dagger: np.ndarray
    omega0: float
    profile: SpectralProfile

    def __post_init__(self):
        d = np.atleast_2d(np.asarray(self.d, dtype=complex))
        dd = np.atleast_2d(np.asarray(self.d_dagger, dtype=complex))
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "d_dagger", dd)
        if self.kind not in ("linear", "rwa_matrix", "spin_boson"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if d.shape[0] != d.shape[1]:
            raise ValueError("coupling matrix must be square")
        if not np.allclose(dd, d.conj().T, atol=1e-12, rtol=0.0):
            raise ValueError("d_dagger is not the conjugate transpose of d")
        if self.kind == "linear" and d.shape != (1, 1):
            raise ValueError("the linear model needs a scalar coupling")
        if self.kind == "spin_boson":
            if d.shape != (2, 2) or not np.array_equal(d, SPIN_BOSON_D):
                raise ValueError(
                    "the spin-flip model uses the fixed 2x2 coupling matrix"
                )

    @classmethod
    def linear(cls, coupling: complex, omega0: float,
               profile: SpectralProfile) -> "SystemModel":
        d = np.array([[coupling]], dtype=complex)
        return cls("linear", d, d.conj().T, float(omega0), profile)

    @classmethod
    def rwa_matrix(cls, d, omega0: float,
                   profile: SpectralProfile) -> "SystemModel":
        d = np.atleast_2d(np.asarray(d, dtype=complex))
        return cls("rwa_matrix", d, d.conj().T, float(omega0), profile)

    @classmethod
    def spin_boson(cls, delta: float, profile: SpectralProfile) -> "SystemModel":
        d = SPIN_BOSON_D
        return cls("spin_boson", d, d.conj().T, float(delta), profile)

    @property
    def delta(self) -> float:
        if self.kind != "spin_boson":
            raise UnsupportedInputError("only the spin-flip model carries a gap")
        return self.omega0

    @property
    def dim(self) -> int:
        return self.d.shape[0]

    @property
    def number_op(self) -> np.ndarray:
        return self.d_dagger @ self.d


@dataclass(frozen=True, eq=False)
class VacuumExpectation:
    """Matrix-valued vacuum expectation at time t.

    ``order`` records which coupling order the matrix represents: 0 for the
    leading term, 1 for the (identically vanishing) first correction, 2 for
    a value that is itself the lam^2 coefficient or includes terms through
    lam^2 (see each producer's docstring).
    """

    value: np.ndarray
    order: int
    t: float
    truncation_bound: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "value",
                           np.atleast_2d(np.asarray(self.value, dtype=complex)))


@lru_cache(maxsize=256)
def _gammas(profile: SpectralProfile, omega0: float) -> tuple[complex, complex]:
    return (gamma_causal(profile, omega0, 0), gamma_causal(profile, omega0, 1))


def c_of_t(profile: SpectralProfile, omega0: float, t: float,
           *, tol: float = 1e-10) -> complex:
    """Decaying kernel C(t) = int rho(w) e^{-i(w - w0) t} / (w - w0 - i0)^2 dw.

    The scalar kernel only; the model multiplies it by D+D.  At t = 0 it
    equals minus the order-1 causal constant (same integrand).  Evaluated by
    the same by-parts-plus-Plemelj reduction as the static constants, applied
    to the oscillatory numerator.
    """
    if t < 0.0:
        raise ValueError("the kernel is defined for t >= 0")
    lo, hi = profile.trunc_support(_TAIL_TOL)
    d1 = profile.deriv_fn(1)

    def h(w):
        w = np.asarray(w, dtype=float)
        return profile.rho(w) * np.exp(-1j * (w - omega0) * t)

    def dh(w):
        w = np.asarray(w, dtype=float)
        return (d1(w) - 1j * t * profile.rho(w)) * np.exp(-1j * (w - omega0) * t)

    panels = max(1, int((hi - lo) * t / (2.0 * np.pi)) + 1)
    res = cauchy_integral(h, omega0, lo, hi, order=2, tol=tol, h_deriv=dh,
                          initial_panels=min(panels, 512))
    return res.value


class LinearAbc(NamedTuple):
    full: complex
    truncated: complex


def linear_abc(model: SystemModel, lam: float, t: float,
               *, tol: float = 1e-10) -> LinearAbc:
    """Exact and truncated vacuum amplitude of the linear model.

    full      = exp(-gamma_0 t |D|^2 + lam^2 gamma_1 |D|^2
                    + lam^2 |D|^2 C(t/lam^2))
    truncated = exp(-gamma_0 t |D|^2) (1 + lam^2 gamma_1 |D|^2)
    """
    if model.kind != "linear":
        raise UnsupportedInputError("ABC amplitude needs the scalar model")
    g0, g1 = _gammas(model.profile, model.omega0)
    d2 = float(np.real(model.number_op[0, 0]))
    truncated = np.exp(-g0 * t * d2) * (1.0 + lam * lam * g1 * d2)
    if lam == 0.0:
        return LinearAbc(complex(np.exp(-g0 * t * d2)), complex(truncated))
    c_val = c_of_t(model.profile, model.omega0, t / (lam * lam), tol=tol)
    full = np.exp(-g0 * t * d2 + lam * lam * g1 * d2 + lam * lam * d2 * c_val)
    return LinearAbc(complex(full), complex(truncated))


def autocorrelation_kernel(profile: SpectralProfile, omega0: float):
    """G(s) = int rho(w) e^{-i(w - w0)s} dw as a closed form when available."""
    if profile.is_symbolic and not np.isfinite(profile.support[0]) \
            and not np.isfinite(profile.support[1]):
        return fourier(profile.symbolic).reflect().modulate(omega0)
    lo, hi = profile.trunc_support(_TAIL_TOL)

    def g(s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty(s.shape, dtype=complex)
        for i, si in enumerate(s):
            out[i] = adaptive_quad(
                lambda w: profile.rho(np.asarray(w))
                * np.exp(-1j * (np.asarray(w) - omega0) * si),
                lo, hi, tol=1e-11,
                initial_panels=max(1, int((hi - lo) * abs(si) / 6.0) + 1),
            ).value
        return out

    return g


def cumulant_oracle(model: SystemModel, lam: float, t: float,
                    *, tol: float = 1e-11) -> complex:
    """Second-cumulant vacuum amplitude of the linear model.

    exp(-|D|^2 lam^2 II(T)) at T = t/lam^2, with the double time integral
    reduced to  II(T) = int_0^T (T - s) G(s) ds.  Exact for this model
    because the interaction is linear in the field operators; the absence of
    any extra phase was validated against a truncated two-mode propagation.
    """
    if model.kind != "linear":
        raise UnsupportedInputError("the cumulant amplitude needs the scalar model")
    if t < 0.0:
        raise ValueError("t must be nonnegative")
    if t == 0.0:
        return 1.0 + 0.0j
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    d2 = float(np.real(model.number_op[0, 0]))
    big_t = t / (lam * lam)
    g = autocorrelation_kernel(model.profile, model.omega0)
    if isinstance(g, GaussPolySum):
        _, s_tail = g.tail_interval(0.1 * tol / max(big_t, 1.0))
        upper = min(big_t, max(s_tail, 1.0))
        kernel = g
    else:
        upper = big_t
        kernel = g

    def integrand(s):
        s = np.asarray(s)
        return (big_t - s) * kernel(s)

    val = adaptive_quad(integrand, 0.0, upper, tol=tol).value
    return complex(np.exp(-d2 * lam * lam * val))


def rwa_matrix_vacuum(model: SystemModel, lam: float, t: float,
                      *, series_tol: float = 1e-12,
                      k_max: int = 200) -> VacuumExpectation:
    """Vacuum expectation of the co-rotating matrix model through lam^2.

    e^{-g0 t X} [1 + lam^2 g1 X (1 - g0 t X)]
      - lam^2 g1 sum_{k>=1} ((-g0 t)^k / k!) sum_{p=1}^k X^{p-1} Y X^{k-p}

    with X = D+D and Y = (D+)^2 D^2.  The series is summed with the
    recurrence S_{k+1} = X S_k + Y X^k and cut once the factorial tail bound
    sum_{j>k} (|g0 t|^j/j!) j ||X||^{j-1} ||Y||  drops below ``series_tol``
    times the norm of the partial result; the bound is reported on the
    returned value.  The matrix exponential is scaling-and-squaring with a
    Pade approximant (scipy's expm), deterministic for a fixed input.
    """
    if model.kind not in ("rwa_matrix", "linear"):
        raise UnsupportedInputError("the series formula needs the co-rotating model")
    g0, g1 = _gammas(model.profile, model.omega0)
    x = model.number_op
    y = model.d_dagger @ model.d_dagger @ model.d @ model.d
    dim = model.dim
    eye = np.eye(dim, dtype=complex)
    c = -g0 * t
    bracket = expm(c * x) @ (eye + lam * lam * g1 * (x - g0 * t * x @ x))

    norm_x = float(np.linalg.norm(x, 2))
    norm_y = float(np.linalg.norm(y, 2))
    series = np.zeros_like(eye)
    s_k = y.copy()                     # S_1
    x_pow = x.copy()                   # X^1
    coeff = c                          # c^k / k!
    tail = math.inf
    k = 1
    while True:
        series = series + coeff * s_k
        xnorm = abs(c) * norm_x
        # sum_{m>=k} y^m/m!, stable via the regularised incomplete gamma
        tail_sum = float(np.exp(xnorm) * gammainc(k, xnorm))
        tail = abs(g1) * lam * lam * norm_y * abs(c) * tail_sum
        ref = max(float(np.linalg.norm(bracket - lam * lam * g1 * series, 2)),
                  1.0)
        if tail <= series_tol * ref:
            break
        if k >= k_max:
            raise AccuracyError(
                f"operator series not converged after {k_max} terms",
                error=tail,
            )
        s_k = x @ s_k + y @ x_pow
        x_pow = x_pow @ x
        k += 1
        coeff = coeff * c / k
    value = bracket - lam * lam * g1 * series
    return VacuumExpectation(value=value, order=2, t=float(t),
                             truncation_bound=tail)


def u0_vacuum(model: SystemModel, t: float) -> VacuumExpectation:
    """Leading-order vacuum expectation exp(-gamma_0 t D+D)."""
    if model.kind == "spin_boson":
        raise UnsupportedInputError(
            "the spin-flip model has its own leading-order formula"
        )
    g0, _ = _gammas(model.profile, model.omega0)
    return VacuumExpectation(expm(-g0 * t * model.number_op), order=0,
                             t=float(t))


def u1_vacuum(model: SystemModel, t: float) -> VacuumExpectation:
    """First-order vacuum expectation: identically the zero matrix.

    The first correction obeys the same homogeneous vacuum-projected
    equation as the leading term (the extra noise terms have a creator
    acting leftward on the vacuum or an annihilator acting rightward on it,
    so they average to zero) but starts from zero initial data; the unique
    solution is zero for all t.  Corrections to vacuum expectations
    therefore begin at order lam^2.
    """
    return VacuumExpectation(np.zeros((model.dim, model.dim), dtype=complex),
                             order=1, t=float(t))


# ---------------------------------------------------------------------------
# spin-flip model
# ---------------------------------------------------------------------------


def _projections():
    d = SPIN_BOSON_D
    dd = d @ d.conj().T
    nn = d.conj().T @ d
    return dd, nn


def spinboson_u0(constants: SpinBosonConstants, t: float) -> VacuumExpectation:
    """Leading order: e^{i A_1 t} DD+ + e^{i A_2 t} D+D (identity at t = 0)."""
    dd, nn = _projections()
    a1, a2 = constants.a
    value = np.exp(1j * a1 * t) * dd + np.exp(1j * a2 * t) * nn
    return VacuumExpectation(value, order=0, t=float(t))


def _spinboson_rhs(constants: SpinBosonConstants, t: float,
                   f: np.ndarray) -> np.ndarray:
    dd, nn = _projections()
    a1, a2 = constants.a
    c1, c2 = constants.c
    gen = 1j * a1 * dd + 1j * a2 * nn
    source = -dd * c1 * np.exp(1j * a1 * t) - nn * c2 * np.exp(1j * a2 * t)
    return gen @ f + source


def spinboson_correction_ode(constants: SpinBosonConstants, t_end: float,
                             step: float) -> VacuumExpectation:
    """lam^2 correction by classic fourth-order one-step integration.

    Initial data f(0) = -B_1 DD+ - B_2 D+D, the choice that matches the
    assembled two-branch expansion.  Global error is O(step^4).
    """
    if step <= 0.0:
        raise ValueError("step must be positive")
    dd, nn = _projections()
    b1, b2 = constants.b
    f = -b1 * dd - b2 * nn
    n_steps = int(round(t_end / step))
    h = t_end / n_steps if n_steps > 0 else step
    t = 0.0
    for _ in range(n_steps):
        k1 = _spinboson_rhs(constants, t, f)
        k2 = _spinboson_rhs(constants, t + h / 2.0, f + h / 2.0 * k1)
        k3 = _spinboson_rhs(constants, t + h / 2.0, f + h / 2.0 * k2)
        k4 = _spinboson_rhs(constants, t + h, f + h * k3)
        f = f + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        t += h
    return VacuumExpectation(f, order=2, t=float(t_end))


def spinboson_correction_closed(constants: SpinBosonConstants,
                                t: float) -> VacuumExpectation:
    """Closed-form lam^2 correction
    (-B_1 - C_1 t) e^{i A_1 t} DD+ + (-B_2 - C_2 t) e^{i A_2 t} D+D."""
    dd, nn = _projections()
    a1, a2 = constants.a
    b1, b2 = constants.b
    c1, c2 = constants.c
    value = ((-b1 - c1 * t) * np.exp(1j * a1 * t) * dd
             + (-b2 - c2 * t) * np.exp(1j * a2 * t) * nn)
    return VacuumExpectation(value, order=2, t=float(t))


# ---------------------------------------------------------------------------
# multipole pairings of the smeared two-point kernel
# ---------------------------------------------------------------------------


def multipole_pairing_term(n: int, phi: GaussPolySum, psi: GaussPolySum,
                           profile: SpectralProfile, omega0: float) -> complex:
    """Coefficient of lam^{2(n+1)} in the smeared two-point kernel.

    Equals gamma~_n times the delta-derivative pairing
    (-1)^n int conj(phi(t)) psi^(n)(t) dt, both factors in closed form.  The
    direction of the derivative action (on psi, with the (-1)^n sign) was
    frozen against the coefficient extraction oracle, not chosen by eye.
    """
    if n > 2:
        raise CapabilityError("pairings are implemented for orders n <= 2")
    gt = gamma_full(profile, omega0, n)
    pairing = phi.conjugate().times(psi.derivative(n)).integral()
    return complex(gt * (-1.0) ** n * pairing)


def smeared_two_point(profile: SpectralProfile, omega0: float,
                      phi: GaussPolySum, psi: GaussPolySum, lam: float,
                      *, tol: float = 1e-12) -> complex:
    """Two-point kernel of the unscaled collective pair, smeared with phi, psi.

    S(lam) = int rho(w) conj(phi~(v)) psi~(v) |_{v = (w - w0)/lam^2} dw
           = lam^2 int rho(w0 + lam^2 v) conj(phi~(v)) psi~(v) dv,

    evaluated in the second (dilation-free) form.  Its small-lam expansion
    runs over powers lam^{2(n+1)}; the coefficients are what
    :func:`multipole_pairing_term` produces.
    """
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    phit = fourier(phi)
    psit = fourier(psi)
    weight = phit.conjugate().times(psit)
    if not weight.terms:
        return 0.0 + 0.0j
    lo, hi = weight.tail_interval(0.1 * tol)
    lam2 = lam * lam
    slo, shi = profile.support
    breaks = []
    for edge in (slo, shi):
        if np.isfinite(edge):
            v_edge = (edge - omega0) / lam2
            if lo < v_edge < hi:
                breaks.append(v_edge)

    def integrand(v):
        v = np.asarray(v)
        return (lam2 * profile.rho(omega0 + lam2 * np.real(v))
                * phit.conjugate()(v) * psit(v))

    return adaptive_quad(integrand, lo, hi, tol=tol,
                         breakpoints=tuple(breaks)).value
