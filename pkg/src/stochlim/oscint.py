"""Rescaled oscillatory pair integrals, their expansions, and rate measurement.

The kernel exp(i x t / lambda^2)/lambda^2 concentrates as lambda -> 0; paired
with two test functions its value admits an expansion in powers of lambda^2
whose coefficients are derivative products at the origin.  Every integral
here is evaluated on the Fourier side, where the same rescaling turns the
oscillation into a smooth dilation:

    full line :  I(lam)  = int f~(tau) phi(lam^2 tau) dtau
    simplex   :  I(lam)  = int_{-a/lam^2}^{0} f~(y) phi(lam^2 y + a) dy
    half line :  I(lam)  = int_0^inf f~(s) phi(lam^2 s) ds

so no oscillatory quadrature is performed at small lambda.  The o(lambda^2N)
remainder statements are rendered quantitatively as log-log slope fits of the
residual against lambda.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import CapabilityError, InsufficientDataError
from .funcspace import (
    GaussPolySum,
    PiecewiseC1,
    derivative_at,
    fourier,
    gaussian,
    half_line_moment,
)
from .quadrature import adaptive_quad
from .textio import csv_table, fmt_float

__all__ = [
    "LambdaGrid",
    "ExpansionReport",
    "pair_integral",
    "expansion_sum",
    "simplex_integral",
    "SimplexExpansion",
    "simplex_expansion",
    "halfline_integral",
    "halfline_expansion",
    "halfline_pole_pairing",
    "convergence_slope",
    "expansion_report",
    "DEFAULT_QUAD_TOL",
    "NOISE_FLOOR_FACTOR",
]

DEFAULT_QUAD_TOL = 1e-11
# residuals below NOISE_FLOOR_FACTOR * quadrature tolerance are excluded
# from slope fits; they measure the integrator, not the expansion.
NOISE_FLOOR_FACTOR = 100.0


@dataclass(frozen=True)
class LambdaGrid:
    """Strictly decreasing coupling values in (0, 1)."""

    values: tuple

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(not (0.0 < v < 1.0) for v in vals):
            raise ValueError("lambda values must lie in (0, 1)")
        if any(a <= b for a, b in zip(vals, vals[1:])):
            raise ValueError("lambda grid must be strictly decreasing")
        object.__setattr__(self, "values", vals)

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)


def pair_integral(f: GaussPolySum, phi: GaussPolySum, lam: float,
                  *, tol: float = DEFAULT_QUAD_TOL) -> complex:
    """Value of the full-line pair integral at coupling ``lam``.

    Computed as int f~(tau) phi(lam^2 tau) dtau; the truncation radius comes
    from the analytic tail bound of the symbolic product, the value from
    adaptive quadrature of the pointwise product.
    """
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    ft = fourier(f)
    phis = phi.scale_arg(lam * lam)
    prod = ft.times(phis)
    if not prod.terms:
        return 0.0 + 0.0j
    lo, hi = prod.tail_interval(0.1 * tol)

    def integrand(tau):
        return ft(tau) * phis(tau)

    return adaptive_quad(integrand, lo, hi, tol=tol).value


def expansion_sum(f: GaussPolySum, phi: GaussPolySum, lam: float, N: int,
                  *, max_order: int = 8) -> complex:
    """Partial sum 2 pi sum_{n<=N} (i lam^2)^n / n! f^(n)(0) phi^(n)(0)."""
    total = 0.0 + 0.0j
    fact = 1.0
    for n in range(N + 1):
        if n > 0:
            fact *= n
        total += (
            (1j * lam * lam) ** n
            / fact
            * derivative_at(f, n, 0.0, max_order=max_order)
            * derivative_at(phi, n, 0.0, max_order=max_order)
        )
    return 2.0 * np.pi * total


def simplex_integral(f: GaussPolySum, phi: PiecewiseC1, a: float, lam: float,
                     *, tol: float = DEFAULT_QUAD_TOL) -> complex:
    """Time-ordered pair integral with endpoint ``a`` at coupling ``lam``.

    After the substitution y = (t - a)/lam^2 each piece contributes
    int f~(y) phi_i(lam^2 y + a) dy over [-a/lam^2, min(0, (a_i - a)/lam^2)].
    """
    if a <= 0.0:
        raise ValueError("endpoint a must be positive")
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    ft = fourier(f)
    if not ft.terms:
        return 0.0 + 0.0j
    lo_tail, hi_tail = ft.tail_interval(0.1 * tol)
    lam2 = lam * lam
    total = 0.0 + 0.0j
    for piece, cutoff in phi.pieces:
        lo = max(-a / lam2, lo_tail)
        hi = min(0.0, (cutoff - a) / lam2)
        hi = min(hi, hi_tail)
        if hi <= lo:
            continue

        def integrand(y, piece=piece):
            return ft(y) * piece(lam2 * np.asarray(y) + a)

        total += adaptive_quad(integrand, lo, hi, tol=tol).value
    return total


class SimplexExpansion(NamedTuple):
    leading: complex
    correction: complex

    @property
    def total(self) -> complex:
        return self.leading + self.correction


def simplex_expansion(f: GaussPolySum, phi: PiecewiseC1, a: float, lam: float,
                      *, tol: float = DEFAULT_QUAD_TOL) -> SimplexExpansion:
    """Leading term plus lambda^2 correction of the simplex integral.

    leading    = phi(a-) * int_{-inf}^0 f~(y) dy
    correction = lam^2 * phi'_L(a) * int_{-inf}^0 y f~(y) dy

    The causal delta and its derivative never appear as objects; only their
    pairings with ``phi`` do - the value and left derivative at ``a``.  Past
    the last cutoff both pairings vanish and the expansion is exactly zero.
    """
    if a <= 0.0:
        raise ValueError("endpoint a must be positive")
    ft = fourier(f)
    phi_a = phi.value_left(a)
    dphi_a = phi.deriv_left(a)
    if phi_a == 0.0 and dphi_a == 0.0:
        return SimplexExpansion(0.0 + 0.0j, 0.0 + 0.0j)
    m0 = half_line_moment(ft, 0, "negative", tol=tol).value
    m1 = half_line_moment(ft, 1, "negative", tol=tol).value
    return SimplexExpansion(phi_a * m0, lam * lam * dphi_a * m1)


def halfline_integral(f: GaussPolySum, phi: GaussPolySum, lam: float,
                      *, tol: float = DEFAULT_QUAD_TOL) -> complex:
    """Chronological (theta-weighted) pair integral, Fourier side."""
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    ft = fourier(f)
    phis = phi.scale_arg(lam * lam)
    prod = ft.times(phis)
    if not prod.terms:
        return 0.0 + 0.0j
    _, hi = prod.tail_interval(0.1 * tol)

    def integrand(s):
        return ft(s) * phis(s)

    return adaptive_quad(integrand, 0.0, max(hi, 1.0), tol=tol).value


def halfline_expansion(f: GaussPolySum, phi: GaussPolySum, lam: float, N: int,
                       *, tol: float = DEFAULT_QUAD_TOL) -> complex:
    """Partial sum sum_{n<=N} lam^{2n} phi^(n)(0)/n! * int_0^inf s^n f~(s) ds."""
    if N not in (0, 1):
        raise CapabilityError("half-line expansion is implemented for N in {0, 1}")
    ft = fourier(f)
    total = 0.0 + 0.0j
    fact = 1.0
    for n in range(N + 1):
        if n > 0:
            fact *= n
        mom = half_line_moment(ft, n, "positive", tol=tol).value
        total += (lam * lam) ** n * derivative_at(phi, n, 0.0) / fact * mom
    return total


def halfline_pole_pairing(f: GaussPolySum, *, tol: float = DEFAULT_QUAD_TOL) -> complex:
    """The boundary-value pairing i * int f(x)/(x + i0) dx.

    Equals int_0^inf f~(s) ds; exposed so the two routes can be compared.
    The principal value is taken by subtracting f(0) e^{-x^2}, whose own
    principal value vanishes by oddness.
    """
    f0 = complex(f(np.array([0.0]))[0])
    sub = f + gaussian(1.0, 0.0, (-f0,))
    lo, hi = f.tail_interval(0.1 * tol) if f.terms else (-1.0, 1.0)
    lo, hi = min(lo, -8.0), max(hi, 8.0)
    df0 = complex(sub.derivative()(np.array([0.0]))[0])

    def integrand(x):
        x = np.asarray(x)
        safe = np.where(np.abs(x) < 1e-9, 1.0, x)
        val = sub(x) / safe
        return np.where(np.abs(x) < 1e-9, df0, val)

    pv = adaptive_quad(integrand, lo, hi, tol=tol, breakpoints=(0.0,)).value
    return 1j * pv + np.pi * f0


def convergence_slope(residuals: Sequence[float], grid: LambdaGrid,
                      *, noise_floor: float = NOISE_FLOOR_FACTOR * DEFAULT_QUAD_TOL
                      ) -> tuple[float, float]:
    """Least-squares slope of log(residual) against log(lambda).

    Returns (slope, half-width), the half-width being the standard error of
    the fitted slope.  Points at or below the noise floor are dropped; fewer
    than four surviving points is an error, not a silent fit.
    """
    lam = np.asarray(list(grid), dtype=float)
    res = np.asarray(list(residuals), dtype=float)
    if lam.shape != res.shape:
        raise ValueError("grid and residuals must align")
    keep = res > noise_floor
    if np.count_nonzero(keep) < 4:
        raise InsufficientDataError(
            f"only {np.count_nonzero(keep)} residuals above the noise floor "
            f"{noise_floor:g}; need at least 4"
        )
    x = np.log(lam[keep])
    y = np.log(res[keep])
    n = len(x)
    xbar = x.mean()
    sxx = np.sum((x - xbar) ** 2)
    slope = float(np.sum((x - xbar) * y) / sxx)
    intercept = float(y.mean() - slope * xbar)
    ssr = float(np.sum((y - slope * x - intercept) ** 2))
    if n > 2 and ssr > 0.0:
        half = float(np.sqrt(ssr / (n - 2) / sxx))
    else:
        half = 0.0
    return slope, half


@dataclass(frozen=True)
class ExpansionReport:
    """Per-lambda integral/partial-sum table with the fitted residual slope."""

    lambdas: tuple
    integrals: tuple
    sums: tuple
    residuals: tuple
    slope: float
    halfwidth: float

    def to_csv(self) -> str:
        rows = []
        for lam, i, s, r in zip(self.lambdas, self.integrals, self.sums,
                                self.residuals):
            rows.append(
                [
                    fmt_float(lam),
                    fmt_float(i.real),
                    fmt_float(i.imag),
                    fmt_float(s.real),
                    fmt_float(s.imag),
                    fmt_float(r),
                ]
            )
        return csv_table(
            ["lambda", "re_integral", "im_integral", "re_sum", "im_sum",
             "residual"],
            rows,
        )

    def summary(self, slope_min: float, slope_max: float = float("inf")) -> dict:
        ok = self.slope >= slope_min and self.slope <= slope_max
        return {
            "slope": self.slope,
            "halfwidth": self.halfwidth,
            "slope_min": slope_min,
            "slope_max": slope_max,
            "pass": bool(ok),
        }


def expansion_report(theorem: str, f: GaussPolySum, phi, N: int,
                     grid: LambdaGrid, *, a: float = 1.0,
                     tol: float = DEFAULT_QUAD_TOL) -> ExpansionReport:
    """Run one expansion check across the grid and fit the residual slope.

    ``theorem`` selects the kernel: ``fullline`` (pair integral against its
    derivative expansion), ``simplex`` (endpoint ``a`` against the causal
    leading + correction terms), or ``halfline`` (chronological kernel).
    For the simplex case with ``a`` beyond every cutoff the expansion terms
    are exactly zero and the residual is the integral magnitude itself.
    """
    integrals = []
    sums = []
    for lam in grid:
        if theorem == "fullline":
            i_val = pair_integral(f, phi, lam, tol=tol)
            s_val = expansion_sum(f, phi, lam, N)
        elif theorem == "simplex":
            i_val = simplex_integral(f, phi, a, lam, tol=tol)
            s_val = simplex_expansion(f, phi, a, lam, tol=tol).total
        elif theorem == "halfline":
            i_val = halfline_integral(f, phi, lam, tol=tol)
            s_val = halfline_expansion(f, phi, lam, N, tol=tol)
        else:
            raise ValueError(f"unknown theorem selector {theorem!r}")
        integrals.append(i_val)
        sums.append(s_val)
    residuals = tuple(abs(i - s) for i, s in zip(integrals, sums))
    slope, half = convergence_slope(residuals, grid,
                                    noise_floor=NOISE_FLOOR_FACTOR * tol)
    return ExpansionReport(
        lambdas=tuple(grid),
        integrals=tuple(integrals),
        sums=tuple(sums),
        residuals=residuals,
        slope=slope,
        halfwidth=half,
    )
