"""Closed-form test functions and one-dimensional spectral reduction.

The test-function family is ``p(x) * exp(-a(x - c)^2)`` with a complex
polynomial ``p``, complex width ``a`` (``Re a > 0``) and complex centre ``c``.
Allowing complex centres makes the family closed under every operation the
rest of the package needs: differentiation, products, multiplication by
polynomials, modulation by pure phases, Fourier transform, reflection,
argument scaling, and full-line or segment integration.  All of those are
exact polynomial algebra (plus ``erf`` for segments), so derivative and
transform values carry no discretisation error - which is what makes the
small-coupling slope measurements downstream trustworthy.

The second half of the module reduces a radial dispersion/formfactor pair in
``d`` dimensions to a one-dimensional density of states rho(omega), so that
every momentum-space integral downstream becomes one-dimensional.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
import numpy.polynomial.polynomial as npoly
from scipy.special import erf

from .errors import AccuracyError, CapabilityError, UnsupportedInputError
from .quadrature import QuadResult, adaptive_quad, fd_derivative

__all__ = [
    "GaussPoly",
    "GaussPolySum",
    "gaussian",
    "derivative_at",
    "fourier",
    "inverse_fourier",
    "half_line_moment",
    "PiecewiseC1",
    "MasslessDispersion",
    "MassiveDispersion",
    "CustomDispersion",
    "SpectralProfile",
    "radial_reduce",
    "unit_sphere_area",
]

MAX_DERIVATIVE_ORDER = 8


def _poly_shift(coeffs: np.ndarray, h: complex) -> np.ndarray:
    """Coefficients of p(h + u) as a polynomial in u."""
    n = len(coeffs)
    out = np.zeros(n, dtype=complex)
    for k, ck in enumerate(coeffs):
        if ck == 0:
            continue
        for j in range(k + 1):
            out[j] += ck * math.comb(k, j) * h ** (k - j)
    return out


def _gauss_moments(a: complex, nmax: int) -> np.ndarray:
    """M_m = integral of v^m exp(-a v^2) over the real line, m = 0..nmax."""
    m = np.zeros(nmax + 1, dtype=complex)
    m[0] = np.sqrt(np.pi / a)
    for k in range(2, nmax + 1, 2):
        m[k] = (k - 1) / (2.0 * a) * m[k - 2]
    return m


@dataclass(frozen=True, eq=False)
class GaussPoly:
    """One term p(x) * exp(-a (x - c)^2); a, c and the coefficients complex."""

    coeffs: np.ndarray
    width: complex
    center: complex = 0.0

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        c = npoly.polytrim(c)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "width", complex(self.width))
        object.__setattr__(self, "center", complex(self.center))
        if not self.width.real > 0.0:
            raise ValueError("Gaussian width must have positive real part")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        return npoly.polyval(x, self.coeffs) * np.exp(
            -self.width * (x - self.center) ** 2
        )

    def scaled(self, z: complex) -> "GaussPoly":
        return GaussPoly(self.coeffs * z, self.width, self.center)

    def derivative(self) -> "GaussPoly":
        p = self.coeffs
        dp = npoly.polyder(p) if len(p) > 1 else np.zeros(1, dtype=complex)
        lin = np.array([self.center * 2.0 * self.width, -2.0 * self.width])
        return GaussPoly(npoly.polyadd(dp, npoly.polymul(lin, p)), self.width,
                         self.center)

    def times_poly(self, q: Sequence[complex]) -> "GaussPoly":
        return GaussPoly(npoly.polymul(self.coeffs, np.asarray(q, dtype=complex)),
                         self.width, self.center)

    def times(self, other: "GaussPoly") -> "GaussPoly":
        a1, a2 = self.width, other.width
        c1, c2 = self.center, other.center
        a = a1 + a2
        c = (a1 * c1 + a2 * c2) / a
        kappa = a1 * a2 / a * (c1 - c2) ** 2
        coeffs = npoly.polymul(self.coeffs, other.coeffs) * np.exp(-kappa)
        return GaussPoly(coeffs, a, c)

    def conjugate(self) -> "GaussPoly":
        # complex conjugate as a function of a *real* argument
        return GaussPoly(np.conj(self.coeffs), np.conj(self.width),
                         np.conj(self.center))

    def modulate(self, beta: complex) -> "GaussPoly":
        """Multiply by exp(i beta x); the phase folds into the complex centre."""
        a, c = self.width, self.center
        k = np.exp(1j * beta * c - beta * beta / (4.0 * a))
        return GaussPoly(self.coeffs * k, a, c + 1j * beta / (2.0 * a))

    def scale_arg(self, s: float) -> "GaussPoly":
        """Replace f(x) by f(s x) for real s != 0."""
        if s == 0:
            raise ValueError("argument scale must be nonzero")
        coeffs = self.coeffs * (s ** np.arange(len(self.coeffs)))
        return GaussPoly(coeffs, self.width * s * s, self.center / s)

    def reflect(self) -> "GaussPoly":
        return self.scale_arg(-1.0)

    def integral(self) -> complex:
        q = _poly_shift(self.coeffs, self.center)
        mom = _gauss_moments(self.width, len(q) - 1)
        return complex(np.sum(q * mom))

    def integral_segment(self, lo: float, hi: float) -> complex:
        """Exact integral over [lo, hi]; either end may be infinite."""
        s = np.sqrt(self.width)
        q = _poly_shift(self.coeffs, self.center)
        w = q * s ** (-np.arange(len(q), dtype=float))
        alpha = None if np.isinf(lo) else s * (lo - self.center)
        beta = None if np.isinf(hi) else s * (hi - self.center)

        def erf_end(z, sign):
            return sign if z is None else erf(z)

        def decay(z, k):
            # z^k * exp(-z^2), zero at the infinite end
            if z is None:
                return 0.0
            return z**k * np.exp(-z * z)

        # I_k = int y^k e^{-y^2} dy from alpha to beta obeys
        # I_k = (k-1)/2 * I_{k-2} + (alpha^{k-1} e^{-alpha^2} - beta^{k-1} e^{-beta^2})/2
        n = len(w)
        ints = np.zeros(n, dtype=complex)
        ints[0] = 0.5 * np.sqrt(np.pi) * (erf_end(beta, 1.0) - erf_end(alpha, -1.0))
        if n > 1:
            ints[1] = 0.5 * (decay(alpha, 0) - decay(beta, 0))
        for k in range(2, n):
            ints[k] = 0.5 * (k - 1) * ints[k - 2] + 0.5 * (
                decay(alpha, k - 1) - decay(beta, k - 1)
            )
        return complex(np.sum(w * ints) / s)

    # -- envelope machinery for tail truncation ---------------------------

    def _envelope(self):
        ar = self.width.real
        ai = self.width.imag
        cr = self.center.real
        ci = self.center.imag
        x0 = cr - ai * ci / ar
        ln_k = (ai * ci) ** 2 / ar + ar * ci * ci
        return ar, x0, ln_k

    def abs_bound(self, x):
        """Pointwise upper bound on |f(x)| for real x (used for tail bounds)."""
        ar, x0, ln_k = self._envelope()
        x = np.asarray(x, dtype=float)
        mag = npoly.polyval(np.abs(x), np.abs(self.coeffs))
        return mag * np.exp(ln_k - ar * (x - x0) ** 2)

    def tail_radius(self, tol: float) -> tuple[float, float]:
        """Interval (x0 - R, x0 + R) outside which the integral of |f| < tol."""
        ar, x0, ln_k = self._envelope()
        r = 1.0
        for _ in range(400):
            edge = max(abs(x0) + r, 1.0)
            env = npoly.polyval(edge, np.abs(self.coeffs)) * np.exp(
                ln_k - ar * r * r
            )
            if 2.0 * env / (2.0 * ar * r) < tol:
                return (x0 - r, x0 + r)
            r *= 1.2
        raise AccuracyError(f"tail bound {tol:g} unachievable", error=env)


def _as_sum(obj) -> "GaussPolySum":
    if isinstance(obj, GaussPolySum):
        return obj
    if isinstance(obj, GaussPoly):
        return GaussPolySum((obj,))
    raise TypeError(f"expected GaussPoly or GaussPolySum, got {type(obj)!r}")


@dataclass(frozen=True, eq=False)
class GaussPolySum:
    """Finite sum of :class:`GaussPoly` terms; the empty sum is the zero function."""

    terms: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    @classmethod
    def zero(cls) -> "GaussPolySum":
        return cls(())

    def __call__(self, x):
        x = np.asarray(x, dtype=complex)
        out = np.zeros(x.shape, dtype=complex)
        for t in self.terms:
            out = out + t(x)
        return out

    def __add__(self, other) -> "GaussPolySum":
        return GaussPolySum(self.terms + _as_sum(other).terms)

    def map(self, fn) -> "GaussPolySum":
        return GaussPolySum(tuple(fn(t) for t in self.terms))

    def scaled(self, z: complex) -> "GaussPolySum":
        return self.map(lambda t: t.scaled(z))

    def derivative(self, n: int = 1) -> "GaussPolySum":
        out = self
        for _ in range(n):
            out = out.map(GaussPoly.derivative)
        return out

    def conjugate(self) -> "GaussPolySum":
        return self.map(GaussPoly.conjugate)

    def modulate(self, beta: complex) -> "GaussPolySum":
        return self.map(lambda t: t.modulate(beta))

    def scale_arg(self, s: float) -> "GaussPolySum":
        return self.map(lambda t: t.scale_arg(s))

    def reflect(self) -> "GaussPolySum":
        return self.map(GaussPoly.reflect)

    def times_poly(self, q) -> "GaussPolySum":
        return self.map(lambda t: t.times_poly(q))

    def times(self, other) -> "GaussPolySum":
        other = _as_sum(other)
        return GaussPolySum(
            tuple(a.times(b) for a in self.terms for b in other.terms)
        )

    def integral(self) -> complex:
        return complex(sum(t.integral() for t in self.terms))

    def integral_segment(self, lo: float, hi: float) -> complex:
        return complex(sum(t.integral_segment(lo, hi) for t in self.terms))

    def tail_interval(self, tol: float) -> tuple[float, float]:
        if not self.terms:
            return (-1.0, 1.0)
        per = tol / len(self.terms)
        spans = [t.tail_radius(per) for t in self.terms]
        return (min(s[0] for s in spans), max(s[1] for s in spans))


def gaussian(width: complex = 1.0, center: complex = 0.0,
             poly: Sequence[complex] = (1.0,)) -> GaussPolySum:
    """Convenience constructor: poly(x) * exp(-width (x - center)^2)."""
    return GaussPolySum((GaussPoly(np.asarray(poly, dtype=complex), width,
                                   center),))


def derivative_at(f: GaussPolySum, n: int, x0: float,
                  max_order: int = MAX_DERIVATIVE_ORDER) -> complex:
    """Exact n-th derivative of f at x0 via the closed-form recurrence.

    No finite differences are involved; the only error is rounding.
    """
    if n < 0:
        raise ValueError("derivative order must be nonnegative")
    if n > max_order:
        raise CapabilityError(
            f"derivative order {n} exceeds the configured maximum {max_order}"
        )
    g = _as_sum(f).derivative(n)
    return complex(g(np.array([x0]))[0])


def fourier(f: GaussPolySum) -> GaussPolySum:
    """Fourier transform under the convention  f~(tau) = int e^{i x tau} f(x) dx."""
    f = _as_sum(f)
    out = []
    for t in f.terms:
        a, c = t.width, t.center
        q = _poly_shift(t.coeffs, c)
        deg = len(q) - 1
        mom = _gauss_moments(a, deg)
        r = np.zeros(deg + 1, dtype=complex)
        for j in range(deg + 1):
            if q[j] == 0:
                continue
            for m in range(0, j + 1, 2):
                r[j - m] += q[j] * math.comb(j, m) * (0.5j / a) ** (j - m) * mom[m]
        base = GaussPoly(r, 1.0 / (4.0 * a), 0.0).modulate(c)
        out.append(base)
    return GaussPolySum(tuple(out))


def inverse_fourier(g: GaussPolySum) -> GaussPolySum:
    """Inverse of :func:`fourier`: f(x) = (1/2 pi) int e^{-i x tau} g(tau) dtau."""
    return fourier(_as_sum(g)).reflect().scaled(1.0 / (2.0 * np.pi))


def half_line_moment(
    ftilde: GaussPolySum,
    m: int,
    side: str,
    *,
    tol: float = 1e-11,
    max_order: int = MAX_DERIVATIVE_ORDER,
) -> QuadResult:
    """Moment  int_{half line} y^m ftilde(y) dy  with the error bound alongside.

    ``side`` is ``"negative"`` for (-inf, 0] or ``"positive"`` for [0, inf).
    The infinite tail is cut where the analytic Gaussian bound drops below a
    tenth of the tolerance; the finite part is integrated adaptively.
    """
    if m < 0:
        raise ValueError("moment order must be nonnegative")
    if m > max_order:
        raise CapabilityError(
            f"moment order {m} exceeds the configured maximum {max_order}"
        )
    if side not in ("negative", "positive"):
        raise ValueError("side must be 'negative' or 'positive'")
    g = _as_sum(ftilde).times_poly([0.0] * m + [1.0])
    if not g.terms:
        return QuadResult(0.0 + 0.0j, 0.0)
    lo, hi = g.tail_interval(0.1 * tol)
    if side == "negative":
        a, b = min(lo, -1.0), 0.0
    else:
        a, b = 0.0, max(hi, 1.0)
    res = adaptive_quad(g, a, b, tol=tol)
    return QuadResult(res.value, res.error + 0.1 * tol)


# ---------------------------------------------------------------------------
# half-line test functions with cutoffs
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PiecewiseC1:
    """phi(t) = sum_i phi_i(t) * 1_{[0, a_i]}(t) with C^1 pieces on the half line.

    Each cutoff is included in its piece, so values are left-continuous and a
    left-derivative exists at every positive point.
    """

    pieces: tuple  # of (GaussPolySum, cutoff)

    def __post_init__(self):
        ps = []
        for f, a in self.pieces:
            a = float(a)
            if a <= 0.0:
                raise ValueError("piece cutoffs must be positive")
            ps.append((_as_sum(f), a))
        object.__setattr__(self, "pieces", tuple(ps))

    @classmethod
    def single(cls, f, cutoff: float) -> "PiecewiseC1":
        return cls(((f, cutoff),))

    def max_cutoff(self) -> float:
        return max((a for _, a in self.pieces), default=0.0)

    def __call__(self, t):
        """Pointwise value on the half line; each piece active on [0, a_i]."""
        t = np.asarray(t, dtype=float)
        out = np.zeros(t.shape, dtype=complex)
        for f, a in self.pieces:
            mask = (t >= 0.0) & (t <= a)
            if np.any(mask):
                out[mask] += f(t[mask])
        return out

    def value_left(self, t: float) -> complex:
        """Left limit at t > 0 (equals the value: pieces include their cutoff)."""
        if t <= 0.0:
            raise ValueError("left limits only exist for t > 0")
        return complex(self(np.array([t]))[0])

    def deriv_left(self, t: float) -> complex:
        """Left derivative at t > 0."""
        if t <= 0.0:
            raise ValueError("left derivatives only exist for t > 0")
        out = 0.0 + 0.0j
        for f, a in self.pieces:
            if t <= a:
                out += f.derivative()(np.array([t]))[0]
        return complex(out)


# ---------------------------------------------------------------------------
# dispersions and the spectral profile
# ---------------------------------------------------------------------------


def unit_sphere_area(d: int) -> float:
    """Area of the unit sphere in d dimensions; d = 1 counts a single ray."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if d == 1:
        return 1.0
    return 2.0 * np.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True)
class MasslessDispersion:
    """omega(r) = r on the positive ray."""

    def omega(self, r):
        return np.asarray(r, dtype=float)

    def domega(self, r):
        return np.ones_like(np.asarray(r, dtype=float))

    def r_of_omega(self, w):
        return np.asarray(w, dtype=float)

    @property
    def omega_min(self) -> float:
        return 0.0


@dataclass(frozen=True)
class MassiveDispersion:
    """omega(r) = sqrt(r^2 + mass^2)."""

    mass: float

    def __post_init__(self):
        if self.mass <= 0.0:
            raise ValueError("mass must be positive")

    def omega(self, r):
        r = np.asarray(r, dtype=float)
        return np.sqrt(r * r + self.mass * self.mass)

    def domega(self, r):
        r = np.asarray(r, dtype=float)
        return r / self.omega(r)

    def r_of_omega(self, w):
        w = np.asarray(w, dtype=float)
        return np.sqrt(np.maximum(w * w - self.mass * self.mass, 0.0))

    @property
    def omega_min(self) -> float:
        return self.mass


@dataclass(frozen=True)
class CustomDispersion:
    """User-supplied radial dispersion, accepted only if strictly monotone."""

    omega_fn: Callable
    domega_fn: Callable

    def omega(self, r):
        return np.asarray(self.omega_fn(np.asarray(r, dtype=float)), dtype=float)

    def domega(self, r):
        return np.asarray(self.domega_fn(np.asarray(r, dtype=float)), dtype=float)


@dataclass(frozen=True, eq=False)
class SpectralProfile:
    """Density of states rho(omega): nonnegative, integrable, on ``support``.

    ``symbolic`` carries the closed form when one exists (synthetic profiles
    and massless reductions); otherwise ``fn`` is a vectorised numeric
    evaluator.  ``smoothness`` is the number of derivatives the profile
    vouches for in the interior of its support.
    """

    support: tuple
    smoothness: int
    symbolic: GaussPolySum | None = None
    fn: Callable | None = None
    trunc: Callable | None = None
    d1_fn: Callable | None = None
    label: str = ""

    def __post_init__(self):
        if self.symbolic is None and self.fn is None:
            raise ValueError("profile needs a symbolic form or a numeric evaluator")

    @classmethod
    def synthetic(cls, shape, support=(-np.inf, np.inf), label="synthetic",
                  smoothness: int = MAX_DERIVATIVE_ORDER) -> "SpectralProfile":
        """Directly prescribed rho, bypassing any radial reduction."""
        return cls(support=tuple(support), smoothness=smoothness,
                   symbolic=_as_sum(shape), label=label)

    @property
    def is_symbolic(self) -> bool:
        return self.symbolic is not None

    def rho(self, w):
        w = np.asarray(w, dtype=float)
        lo, hi = self.support
        mask = (w >= lo) & (w <= hi)
        out = np.zeros(w.shape, dtype=float)
        if np.any(mask):
            if self.symbolic is not None:
                out[mask] = np.real(self.symbolic(w[mask]))
            else:
                out[mask] = np.asarray(self.fn(w[mask]), dtype=float)
        return out

    def __call__(self, w):
        return self.rho(w)

    def deriv_fn(self, n: int):
        """n-th derivative of rho, valid in the interior of the support."""
        if n == 0:
            return self.rho
        if n > self.smoothness:
            raise CapabilityError(
                f"profile '{self.label}' vouches for {self.smoothness} "
                f"derivatives, {n} requested"
            )
        if self.symbolic is not None:
            d = self.symbolic.derivative(n)
            return lambda w: np.real(d(np.asarray(w, dtype=float)))
        if n == 1 and self.d1_fn is not None:
            return self.d1_fn
        lower = self.deriv_fn(n - 1)
        lo, hi = self.support

        def numeric(w):
            w = np.atleast_1d(np.asarray(w, dtype=float))
            out = np.empty(w.shape, dtype=float)
            for i, x in enumerate(w):
                room = min(x - lo, hi - x)
                if not np.isfinite(room):
                    room = np.inf
                if room <= 1e-8:
                    raise CapabilityError(
                        "numeric derivative requested at the support boundary"
                    )
                scale = min(0.05, room / 4.0)
                out[i] = np.real(fd_derivative(lower, x, scale=scale))
            return out

        return numeric

    def deriv_at(self, w: float, n: int) -> float:
        return float(np.atleast_1d(self.deriv_fn(n)(np.array([w])))[0])

    def trunc_support(self, tol: float = 1e-16) -> tuple[float, float]:
        """Finite interval outside which rho's mass is below ``tol``."""
        lo, hi = self.support
        if np.isfinite(lo) and np.isfinite(hi):
            return (float(lo), float(hi))
        if self.trunc is not None:
            tlo, thi = self.trunc(tol)
        elif self.symbolic is not None:
            tlo, thi = self.symbolic.tail_interval(tol)
        else:
            raise UnsupportedInputError(
                "cannot truncate a numeric profile without a trunc rule"
            )
        return (float(max(lo, tlo)), float(min(hi, thi)))

    def scaled(self, s: float) -> "SpectralProfile":
        if self.symbolic is not None:
            return SpectralProfile(self.support, self.smoothness,
                                   symbolic=self.symbolic.scaled(s),
                                   trunc=self.trunc,
                                   label=f"{s}*{self.label}")
        f = self.fn
        return SpectralProfile(self.support, self.smoothness,
                               fn=lambda w: s * np.asarray(f(w)),
                               trunc=self.trunc, label=f"{s}*{self.label}")


def radial_reduce(dispersion, formfactor: GaussPolySum, d: int) -> SpectralProfile:
    """Collapse the d-dimensional pair (omega(k), g(k)) to rho(omega).

    rho(omega) = S_{d-1} r^{d-1} |g(r)|^2 / omega'(r) evaluated at
    r = r(omega), so that the rho-integral of any bounded observable of
    omega reproduces the full d-dimensional integral against |g(k)|^2 dk.
    The dispersion must be strictly monotone with nonvanishing slope on the
    formfactor's support; anything else is rejected (piecewise-monotone
    splitting is not implemented).
    """
    if d < 1 or int(d) != d:
        raise ValueError("dimension must be a positive integer")
    g2 = _as_sum(formfactor).times(_as_sum(formfactor).conjugate())
    area = unit_sphere_area(d)

    _, r_hi = g2.tail_interval(1e-18)
    r_hi = max(r_hi, 1.0)
    sample = np.linspace(1e-9, r_hi, 4001)
    slopes = dispersion.domega(sample)
    if np.any(slopes <= 0.0):
        if np.all(slopes < 0.0):
            raise UnsupportedInputError(
                "decreasing dispersions are not supported; reparametrise"
            )
        raise UnsupportedInputError(
            "dispersion is not strictly monotone with nonzero slope on the "
            "formfactor support"
        )

    if isinstance(dispersion, MasslessDispersion):
        mono = np.zeros(d, dtype=complex)
        mono[d - 1] = area
        rho_sym = g2.times_poly(mono)
        return SpectralProfile(
            support=(0.0, np.inf),
            smoothness=MAX_DERIVATIVE_ORDER,
            symbolic=rho_sym,
            trunc=lambda tol: rho_sym.tail_interval(tol),
            label=f"massless-d{d}",
        )

    if isinstance(dispersion, MassiveDispersion):
        m = dispersion.mass
        g2d = g2.derivative()

        def rho_fn(w):
            w = np.asarray(w, dtype=float)
            r = dispersion.r_of_omega(w)
            return area * r ** (d - 2) * w * np.real(g2(r))

        def rho_d1(w):
            # chain rule through r(w) = sqrt(w^2 - m^2); for d = 3 the first
            # term carries the integrable (w - m)^{-1/2} threshold singularity
            w = np.asarray(w, dtype=float)
            r = dispersion.r_of_omega(w)
            q = np.real(g2(r))
            dq = np.real(g2d(r))
            with np.errstate(divide="ignore"):
                lead = (d - 2) * r ** float(d - 4) * w * w * q
            return area * (lead + r ** (d - 2) * q + r ** (d - 3) * w * w * dq)

        def trunc(tol):
            lo_r, hi_r = g2.tail_interval(tol)
            return (m, float(dispersion.omega(max(hi_r, 1.0))))

        return SpectralProfile(
            support=(m, np.inf),
            smoothness=4,
            fn=rho_fn,
            trunc=trunc,
            d1_fn=rho_d1,
            label=f"massive-m{m}-d{d}",
        )

    raise UnsupportedInputError(
        "only the massless and massive dispersion kinds can be reduced; "
        "custom dispersions are validated but not inverted"
    )
