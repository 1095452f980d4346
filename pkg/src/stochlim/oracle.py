"""Independent verification machinery.

Everything here exists to check the production modules through a different
computational route, so this module deliberately avoids the package's own
quadrature engine: values come from finite closed-form algebra, from
``scipy.integrate``, or from dense matrix exponentials.  Oracles are allowed
to be slow; they run in the verification suite, not in production sweeps.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import integrate
from scipy.linalg import expm

from .errors import AccuracyError, IllConditionedFitError, UnsupportedInputError
from .funcspace import GaussPolySum, fourier

__all__ = [
    "gaussian_closed_form",
    "direct_2d_quadrature",
    "RichardsonFit",
    "richardson_extract",
    "two_mode_propagator",
    "single_mode_closed_form",
]


def gaussian_closed_form(f: GaussPolySum, phi: GaussPolySum,
                         lam: float) -> complex:
    """Pair integral by pure complete-the-square algebra, no quadrature.

    int f~(tau) phi(lam^2 tau) dtau evaluated as the exact full-line
    integral of the symbolic product.
    """
    if lam <= 0.0:
        raise ValueError("lambda must be positive")
    return fourier(f).times(phi.scale_arg(lam * lam)).integral()


def direct_2d_quadrature(f: GaussPolySum, phi: GaussPolySum, lam: float,
                         *, tol: float = 1e-9) -> complex:
    """Literal oscillatory double integral (1/lam^2) e^{i x t / lam^2} f phi.

    Only sane for moderate couplings; below lam = 0.3 the oscillation is
    declared out of policy rather than ground through.  Uses scipy's nested
    1-D adaptive rules on the real and imaginary parts separately.
    """
    if lam < 0.3:
        raise AccuracyError(
            "direct oscillatory quadrature is restricted to lam >= 0.3"
        )
    if not f.terms or not phi.terms:
        return 0.0 + 0.0j
    fx_lo, fx_hi = f.tail_interval(1e-13)
    pt_lo, pt_hi = phi.tail_interval(1e-13)
    inv = 1.0 / (lam * lam)

    def integrand(x, t, part):
        val = inv * np.exp(1j * x * t * inv) * f(np.array([x]))[0] \
            * phi(np.array([t]))[0]
        return val.real if part == 0 else val.imag

    re, _ = integrate.dblquad(lambda x, t: integrand(x, t, 0),
                              pt_lo, pt_hi, fx_lo, fx_hi,
                              epsabs=tol, epsrel=1e-10)
    im, _ = integrate.dblquad(lambda x, t: integrand(x, t, 1),
                              pt_lo, pt_hi, fx_lo, fx_hi,
                              epsabs=tol, epsrel=1e-10)
    return complex(re, im)


@dataclass(frozen=True)
class RichardsonFit:
    """Least-squares extraction of coefficients of prescribed lambda powers."""

    lambdas: tuple
    values: tuple
    powers: tuple
    coefficients: tuple
    residual: float
    condition: float

    def coefficient(self, power: int) -> complex:
        return self.coefficients[self.powers.index(power)]


def richardson_extract(lambdas: Sequence[float], values: Sequence[complex],
                       powers: Sequence[int],
                       *, max_condition: float = 1e8) -> RichardsonFit:
    """Fit values(lam) ~ sum_p coeff_p lam^p over the requested powers.

    Columns are normalised before solving so the reported condition number
    reflects the actual fit; anything above ``max_condition`` is refused
    rather than silently returned.
    """
    lam = np.asarray(list(lambdas), dtype=float)
    val = np.asarray(list(values), dtype=complex)
    pw = [int(p) for p in powers]
    if len(lam) < len(pw) + 2:
        raise ValueError("need at least len(powers) + 2 samples")
    design = np.stack([lam**p for p in pw], axis=1)
    scale = np.linalg.norm(design, axis=0)
    design_n = design / scale
    cond = float(np.linalg.cond(design_n))
    if cond > max_condition:
        raise IllConditionedFitError(
            f"power fit condition number {cond:.3e} exceeds {max_condition:.1e}"
        )
    coef_n, res, *_ = np.linalg.lstsq(design_n, val, rcond=None)
    coef = coef_n / scale
    fitted = design @ coef
    residual = float(np.linalg.norm(val - fitted))
    return RichardsonFit(
        lambdas=tuple(lam),
        values=tuple(complex(v) for v in val),
        powers=tuple(pw),
        coefficients=tuple(complex(c) for c in coef),
        residual=residual,
        condition=cond,
    )


def _mode_ops(cutoff: int):
    dim = cutoff + 1
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1)
    return a, a.conj().T, np.diag(np.arange(dim, dtype=float))


def _two_mode_amplitude(g1: complex, g2: complex, nu1: float, nu2: float,
                        coupling: complex, lam: float, t: float,
                        cutoff: int) -> complex:
    a, adag, num = _mode_ops(cutoff)
    eye = np.eye(cutoff + 1)
    n1 = np.kron(num, eye)
    n2 = np.kron(eye, num)
    a1 = np.kron(a, eye)
    a2 = np.kron(eye, a)
    raise_part = coupling * (g1 * a1.conj().T + g2 * a2.conj().T)
    lower_part = np.conj(coupling) * (np.conj(g1) * a1 + np.conj(g2) * a2)
    h = nu1 * n1 + nu2 * n2 + lam * 1j * (raise_part - lower_part)
    vac = np.zeros((cutoff + 1) ** 2, dtype=complex)
    vac[0] = 1.0
    return complex(vac.conj() @ expm(-1j * t * h) @ vac)


def two_mode_propagator(g1: complex, g2: complex, nu1: float, nu2: float,
                        coupling: complex, lam: float, t: float,
                        fock_cutoff: int = 6) -> complex:
    """Vacuum amplitude of a two-mode linear-coupling evolution, exactly.

    The interaction-picture amplitude equals the Schroedinger one on the
    vacuum, so a dense matrix exponential of the full (time-independent)
    generator suffices.  ``nu1, nu2`` are the mode frequencies already
    shifted into the co-rotating frame.  The amplitude is recomputed with
    the cutoff raised by two; a shift above 1e-8 means the ladder was too
    short and is an error, not a warning.
    """
    if fock_cutoff < 4:
        raise ValueError("fock_cutoff must be at least 4")
    val = _two_mode_amplitude(g1, g2, nu1, nu2, coupling, lam, t, fock_cutoff)
    check = _two_mode_amplitude(g1, g2, nu1, nu2, coupling, lam, t,
                                fock_cutoff + 2)
    if abs(val - check) > 1e-8:
        raise AccuracyError(
            f"two-mode cutoff {fock_cutoff} not converged "
            f"(shift {abs(val - check):.2e})",
            value=check,
            error=abs(val - check),
        )
    return check


def single_mode_closed_form(g: complex, nu: float, coupling: complex,
                            lam: float, t: float) -> complex:
    """Displaced-oscillator vacuum amplitude for one mode, in closed form.

    For H = nu n + kappa a+ + conj(kappa) a with kappa = i lam coupling g the
    amplitude is exp(|kappa|^2 (i t / nu + (e^{-i nu t} - 1)/nu^2)).
    """
    if nu == 0.0:
        raise UnsupportedInputError("the closed form needs a nonzero frequency")
    kappa = 1j * lam * coupling * g
    mod2 = abs(kappa) ** 2
    return complex(np.exp(mod2 * (1j * t / nu
                                  + (np.exp(-1j * nu * t) - 1.0) / nu**2)))
