"""Finite-dimensional indefinite-metric one-particle space and Fock ladder.

The one-particle space is a uniform grid in the frequency variable tau,
offset by half a step so that no point sits at tau = 0 and sign(tau) is
unambiguous.  On that grid three structures are diagonal:

    Hilbert inner product   (f, g) = (1/2 pi) sum |tau_j| conj(f_j) g_j dtau
    indefinite product     <f, g>  = (1/2 pi) sum  tau_j  conj(f_j) g_j dtau
    metric operator         eta    = multiplication by sign(tau_j)

so that <f, g> = (f, eta g) holds exactly (identical weighted sums) and
eta^2 = 1 holds exactly.  Amplitudes are frequency-domain samples of a time
function under the e^{-i tau t} transform; with that orientation the grid
pairing reproduces the time-domain form  i * int conj(f'(t)) g(t) dt, which
is hermitian but genuinely indefinite (swapping real and imaginary parts of
f flips its sign).

Multi-particle states are dense symmetric arrays over the grid up to a
truncation level; creation symmetrises a tensor slot on, annihilation
contracts one slot against the indefinite pairing.  The commutation and
adjointness relations then hold exactly at every level below the truncation,
so their numerical defect measures nothing but rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import TruncationOverflowError
from .funcspace import GaussPolySum, fourier

__all__ = [
    "OneParticleGrid",
    "OneParticleVector",
    "MetricOperator",
    "FockVector",
    "indefinite_inner",
    "hilbert_inner",
    "eta_apply",
    "vacuum",
    "create",
    "annihilate",
    "ccr_defect",
    "adjoint_defect",
    "fock_indefinite_inner",
    "fock_hilbert_norm",
    "closed_form_indefinite_inner",
    "DEFAULT_GRID_SIZE",
    "DEFAULT_TAU_MAX",
    "DEFAULT_TRUNCATION",
]

DEFAULT_GRID_SIZE = 64
DEFAULT_TAU_MAX = 8.0
DEFAULT_TRUNCATION = 3


@dataclass(frozen=True, eq=False)
class OneParticleGrid:
    """Symmetric tau grid with a half-step offset (no node at tau = 0)."""

    size: int = DEFAULT_GRID_SIZE
    tau_max: float = DEFAULT_TAU_MAX

    def __post_init__(self):
        if self.size < 2 or self.size % 2 != 0:
            raise ValueError("grid size must be an even integer >= 2")
        if self.tau_max <= 0.0:
            raise ValueError("tau_max must be positive")

    @property
    def step(self) -> float:
        return 2.0 * self.tau_max / self.size

    @property
    def points(self) -> np.ndarray:
        h = self.step
        return -self.tau_max + h * (np.arange(self.size) + 0.5)

    @property
    def indefinite_weights(self) -> np.ndarray:
        """Diagonal weights of <.,.>: tau_j * dtau / (2 pi)."""
        return self.points * self.step / (2.0 * np.pi)

    @property
    def hilbert_weights(self) -> np.ndarray:
        """Diagonal weights of (.,.): |tau_j| * dtau / (2 pi)."""
        return np.abs(self.points) * self.step / (2.0 * np.pi)

    @property
    def signs(self) -> np.ndarray:
        return np.sign(self.points)


@dataclass(frozen=True, eq=False)
class OneParticleVector:
    """Frequency-domain amplitudes of a one-particle state on a grid."""

    grid: OneParticleGrid
    amps: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amps, dtype=complex)
        if a.shape != (self.grid.size,):
            raise ValueError("amplitude array does not match the grid")
        object.__setattr__(self, "amps", a)

    @classmethod
    def from_time_function(cls, grid: OneParticleGrid,
                           f: GaussPolySum) -> "OneParticleVector":
        """Embed a closed-form time function.

        Amplitudes are samples of the e^{-i tau t} transform, i.e. the
        package's forward transform evaluated at -tau; this orientation makes
        the grid pairing agree with i * int conj(f') g dt (see module notes).
        """
        ft = fourier(f)
        return cls(grid, ft(-grid.points))

    def __add__(self, other: "OneParticleVector") -> "OneParticleVector":
        _check_grid(self, other)
        return OneParticleVector(self.grid, self.amps + other.amps)

    def scaled(self, z: complex) -> "OneParticleVector":
        return OneParticleVector(self.grid, z * self.amps)


def _check_grid(f: OneParticleVector, g) -> None:
    if f.grid is not g.grid and (f.grid.size != g.grid.size
                                 or f.grid.tau_max != g.grid.tau_max):
        raise ValueError("vectors live on different grids")


def indefinite_inner(f: OneParticleVector, g: OneParticleVector) -> complex:
    """<f, g> on the grid; hermitian, not positive definite."""
    _check_grid(f, g)
    return complex(np.sum(f.grid.indefinite_weights * np.conj(f.amps) * g.amps))


def hilbert_inner(f: OneParticleVector, g: OneParticleVector) -> complex:
    _check_grid(f, g)
    return complex(np.sum(f.grid.hilbert_weights * np.conj(f.amps) * g.amps))


@dataclass(frozen=True, eq=False)
class MetricOperator:
    """Diagonal involution sign(tau_j) linking the two products."""

    grid: OneParticleGrid

    @property
    def signs(self) -> np.ndarray:
        return self.grid.signs

    def apply(self, f: OneParticleVector) -> OneParticleVector:
        return OneParticleVector(f.grid, self.signs * f.amps)


def eta_apply(f: OneParticleVector) -> OneParticleVector:
    """Multiply by sign(tau); (f, eta g) equals <f, g> exactly."""
    return MetricOperator(f.grid).apply(f)


def closed_form_indefinite_inner(f: GaussPolySum, g: GaussPolySum) -> complex:
    """Grid-free reference value i * int conj(f'(t)) g(t) dt."""
    return 1j * f.derivative().conjugate().times(g).integral()


# ---------------------------------------------------------------------------
# truncated Fock ladder
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FockVector:
    """Components (f_0, f_1, ..., f_M); level n is a symmetric rank-n array."""

    grid: OneParticleGrid
    comps: tuple

    def __post_init__(self):
        k = self.grid.size
        cs = []
        for n, c in enumerate(self.comps):
            arr = np.asarray(c, dtype=complex)
            if arr.shape != (k,) * n:
                raise ValueError(f"level {n} has shape {arr.shape}, "
                                 f"expected {(k,) * n}")
            cs.append(arr)
        if not cs:
            raise ValueError("a Fock vector needs at least the scalar level")
        object.__setattr__(self, "comps", tuple(cs))

    @property
    def truncation(self) -> int:
        return len(self.comps) - 1

    def level(self, n: int) -> np.ndarray:
        return self.comps[n]

    def __add__(self, other: "FockVector") -> "FockVector":
        _check_grid_f(self, other)
        return FockVector(self.grid, tuple(a + b for a, b in
                                           zip(self.comps, other.comps)))

    def __sub__(self, other: "FockVector") -> "FockVector":
        return self + other.scaled(-1.0)

    def scaled(self, z: complex) -> "FockVector":
        return FockVector(self.grid, tuple(z * c for c in self.comps))


def _check_grid_f(a: FockVector, b: FockVector) -> None:
    if a.grid.size != b.grid.size or a.grid.tau_max != b.grid.tau_max:
        raise ValueError("Fock vectors live on different grids")
    if a.truncation != b.truncation:
        raise ValueError("Fock vectors have different truncation levels")


def vacuum(grid: OneParticleGrid, truncation: int = DEFAULT_TRUNCATION
           ) -> FockVector:
    k = grid.size
    comps = [np.zeros((k,) * n, dtype=complex) for n in range(truncation + 1)]
    comps[0] = np.asarray(1.0 + 0.0j)
    return FockVector(grid, tuple(comps))


def _weighted_sum(arr: np.ndarray, weights: np.ndarray) -> complex:
    out = arr
    for _ in range(arr.ndim):
        out = np.tensordot(out, weights, axes=([-1], [0]))
    return complex(out)


def fock_indefinite_inner(phi: FockVector, psi: FockVector) -> complex:
    """<phi, psi> with one indefinite weight per tensor slot."""
    _check_grid_f(phi, psi)
    w = phi.grid.indefinite_weights
    total = 0.0 + 0.0j
    for a, b in zip(phi.comps, psi.comps):
        total += _weighted_sum(np.conj(a) * b, w)
    return total


def fock_hilbert_norm(phi: FockVector) -> float:
    w = phi.grid.hilbert_weights
    total = 0.0
    for a in phi.comps:
        total += float(np.real(_weighted_sum(np.abs(a) ** 2 + 0.0j, w)))
    return float(np.sqrt(total))


def _symmetrize_first(t: np.ndarray) -> np.ndarray:
    """Symmetrise axis 0 into the remaining (already symmetric) axes."""
    n = t.ndim
    if n == 1:
        return t
    acc = t.copy()
    for m in range(1, n):
        acc += np.moveaxis(t, 0, m)
    return acc / n


def create(f: OneParticleVector, phi: FockVector) -> FockVector:
    """Creation operator smeared with f: level n -> sqrt(n+1) Sym(f x level n).

    The top level of ``phi`` must vanish, otherwise amplitude would be pushed
    past the truncation and the algebra below it would silently break.
    """
    _check_grid(f, phi)
    top = phi.comps[-1]
    if np.any(top != 0.0):
        raise TruncationOverflowError(
            f"creation from an occupied top level {phi.truncation}"
        )
    out = [np.zeros((), dtype=complex)]
    for n in range(phi.truncation):
        t = np.multiply.outer(f.amps, phi.comps[n])
        out.append(np.sqrt(n + 1.0) * _symmetrize_first(t))
    return FockVector(phi.grid, tuple(out))


def annihilate(f: OneParticleVector, phi: FockVector) -> FockVector:
    """Annihilation smeared with f: contracts one slot with <f, .>."""
    _check_grid(f, phi)
    w = phi.grid.indefinite_weights
    pair = w * np.conj(f.amps)
    out = []
    for n in range(1, phi.truncation + 1):
        c = phi.comps[n]
        out.append(np.sqrt(float(n)) * np.tensordot(pair, c, axes=([0], [0])))
    out.append(np.zeros((phi.grid.size,) * phi.truncation, dtype=complex))
    return FockVector(phi.grid, tuple(out))


def ccr_defect(f: OneParticleVector, g: OneParticleVector,
               phi: FockVector) -> float:
    """Norm of ([c_f, c_g+] - <f, g>) phi, relative to the norm of phi.

    ``phi`` may only occupy levels up to truncation - 2, so both operator
    orders stay inside the stored ladder.
    """
    for n in (phi.truncation, phi.truncation - 1):
        if n >= 0 and np.any(phi.comps[n] != 0.0):
            raise TruncationOverflowError(
                "commutator test needs the top two levels empty"
            )
    lhs = annihilate(f, create(g, phi)) - create(g, annihilate(f, phi))
    rhs = phi.scaled(indefinite_inner(f, g))
    norm = fock_hilbert_norm(phi)
    if norm == 0.0:
        return fock_hilbert_norm(lhs - rhs)
    return fock_hilbert_norm(lhs - rhs) / norm


def adjoint_defect(f: OneParticleVector, phi: FockVector,
                   psi: FockVector) -> float:
    """| <c_f phi, psi> - <phi, c_f+ psi> | with the level-wise metric."""
    if np.any(psi.comps[-1] != 0.0):
        raise TruncationOverflowError(
            "adjoint test needs an empty top level in psi"
        )
    lhs = fock_indefinite_inner(annihilate(f, phi), psi)
    rhs = fock_indefinite_inner(phi, create(f, psi))
    return abs(lhs - rhs)
