"""Linear spin-wave model of a bipartite easy-axis antiferromagnet.

Nearest-neighbour Heisenberg exchange J > 0 on a square or simple cubic
lattice, easy-axis anisotropy Kz along z, and a longitudinal magnetic field
entering as the Zeeman energy mu_B*B.  At each wavevector k the model reduces
to a pair of sublattice ("Kittel") boson modes (a, b) with frequencies
omega_a/b and an anomalous pair coupling g_mm; hybridising them yields the
chiral magnon branches (alpha, beta).

Conventions: energies in meV, wavevector components in 1/a with the lattice
constant a = 1 by default, hbar = 1.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InstabilityError

#: Bohr magneton in meV/T, used to convert a field given in tesla into the
#: Zeeman energy mu_B*B.
MU_B_MEV_PER_T = 0.05788


class LatticeKind(enum.Enum):
    SQUARE = "square"
    CUBIC = "cubic"


_COORDINATION = {LatticeKind.SQUARE: 4, LatticeKind.CUBIC: 6}
_DIMENSION = {LatticeKind.SQUARE: 2, LatticeKind.CUBIC: 3}


@dataclass(frozen=True)
class LatticeSpec:
    """Bipartite lattice geometry (square in 2D or simple cubic in 3D)."""

    kind: LatticeKind
    lattice_constant: float = 1.0

    def __post_init__(self):
        if isinstance(self.kind, str):
            object.__setattr__(self, "kind", LatticeKind(self.kind))
        if not self.lattice_constant > 0:
            raise ValueError("lattice_constant must be positive")

    @property
    def coordination(self) -> int:
        """Number of nearest neighbours z (4 for square, 6 for cubic)."""
        return _COORDINATION[self.kind]

    @property
    def dim(self) -> int:
        return _DIMENSION[self.kind]

    def neighbor_vectors(self) -> np.ndarray:
        """The z nearest-neighbour displacement vectors, shape (z, dim)."""
        a = self.lattice_constant
        eye = np.eye(self.dim)
        return np.concatenate([a * eye, -a * eye])


SQUARE = LatticeSpec(LatticeKind.SQUARE)
CUBIC = LatticeSpec(LatticeKind.CUBIC)


@dataclass(frozen=True)
class ModelParams:
    """Spin-Hamiltonian parameters of the antiferromagnet.

    ``muB_B`` is the Zeeman energy mu_B*B in meV; use :meth:`with_field_tesla`
    when the field is specified in tesla.
    """

    lattice: LatticeSpec
    J: float
    Kz: float = 0.0
    muB_B: float = 0.0
    S: float = 0.5
    bohr_magneton: float = MU_B_MEV_PER_T

    def __post_init__(self):
        if not self.J > 0:
            raise ValueError("antiferromagnetic exchange J must be positive")
        if not self.S > 0:
            raise ValueError("spin S must be positive")
        if self.Kz < 0:
            raise ValueError("easy-axis anisotropy Kz must be >= 0")

    @classmethod
    def with_field_tesla(cls, lattice, J, Kz=0.0, B_tesla=0.0, S=0.5,
                         bohr_magneton=MU_B_MEV_PER_T) -> "ModelParams":
        return cls(lattice=lattice, J=J, Kz=Kz, muB_B=bohr_magneton * B_tesla,
                   S=S, bohr_magneton=bohr_magneton)


@dataclass(frozen=True)
class KittelModes:
    """Per-k sublattice-mode data: frequencies, pair coupling, and the
    dimensionless coupling ratio Gamma = 2*g_mm/(omega_a + omega_b)."""

    k: tuple
    omega_a: float
    omega_b: float
    g_mm: complex
    Gamma: complex


@dataclass(frozen=True)
class MagnonDispersion:
    """Chiral magnon frequencies at one wavevector."""

    k: tuple
    omega_alpha: float
    omega_beta: float


def structure_factor(k, lattice: LatticeSpec) -> float:
    """Normalised nearest-neighbour structure factor gamma_k in [-1, 1].

    gamma_k = (1/z) sum_delta exp(i k.delta); real and even in k because the
    neighbour set is inversion symmetric.
    """
    k = np.asarray(k, dtype=float)
    if k.shape != (lattice.dim,):
        raise ValueError(
            f"wavevector must have {lattice.dim} components for "
            f"{lattice.kind.value} lattice, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("wavevector components must be finite")
    # inversion-symmetric neighbour pairs: the phase sum is a cosine mean
    return float(np.mean(np.cos(k * lattice.lattice_constant)))


def kittel_parameters(k, m: ModelParams, check: bool = True) -> KittelModes:
    """Sublattice-mode parameters at wavevector k.

    omega_{a,b} = S*z*J + 2*S*Kz +/- mu_B*B and g_mm = S*z*J*gamma_k.
    Raises :class:`InstabilityError` in the spin-flop regime (omega_b <= 0
    or |Gamma| >= 1), where the harmonic magnon expansion breaks down;
    ``check=False`` skips that validation so sweeps can still record the
    raw parameters of unstable rows.
    """
    z = m.lattice.coordination
    gamma = structure_factor(k, m.lattice)
    base = m.S * z * m.J + 2.0 * m.S * m.Kz
    omega_a = base + m.muB_B
    omega_b = base - m.muB_B
    g_mm = complex(m.S * z * m.J * gamma)
    Gamma = 2.0 * g_mm / (omega_a + omega_b)
    if check:
        if omega_b <= 0 or omega_a <= 0:
            raise InstabilityError(
                f"Kittel frequency driven nonpositive at k={tuple(k)} "
                f"(omega_a={omega_a:.6g}, omega_b={omega_b:.6g} meV)")
        if abs(Gamma) >= 1.0:
            raise InstabilityError(
                f"|Gamma| = {abs(Gamma):.6g} >= 1 at k={tuple(k)}")
    return KittelModes(k=tuple(np.asarray(k, float)), omega_a=omega_a,
                       omega_b=omega_b, g_mm=g_mm, Gamma=Gamma)


def diagonal_frequencies(km: KittelModes) -> MagnonDispersion:
    """Frequencies of the hybridised chiral modes.

    omega_{alpha,beta} = sqrt(wbar^2 - |g_mm|^2) +/- delta with
    wbar = (omega_a + omega_b)/2 and delta = (omega_a - omega_b)/2, so the
    field-induced splitting omega_alpha - omega_beta = omega_a - omega_b is
    preserved exactly.
    """
    wbar = 0.5 * (km.omega_a + km.omega_b)
    delta = 0.5 * (km.omega_a - km.omega_b)
    rad = wbar * wbar - abs(km.g_mm) ** 2
    if rad < 0:
        raise InstabilityError(
            f"|g_mm| exceeds the mean Kittel frequency at k={km.k}")
    root = np.sqrt(rad)
    omega_beta = root - delta
    if omega_beta < 0:
        raise InstabilityError(
            f"omega_beta = {omega_beta:.6g} meV < 0 at k={km.k} "
            "(spin-flop regime)")
    return MagnonDispersion(k=km.k, omega_alpha=root + delta,
                            omega_beta=omega_beta)


def kpath(lattice: LatticeSpec, segments) -> np.ndarray:
    """Piecewise-linear wavevector path.

    ``segments`` is a sequence of ``(start, end, count)`` with count >= 2;
    each segment includes both endpoints.  Returns an array of shape
    (total points, lattice.dim).
    """
    segments = list(segments)
    if not segments:
        raise ValueError("kpath requires at least one segment")
    pieces = []
    for start, end, count in segments:
        start = np.asarray(start, dtype=float)
        end = np.asarray(end, dtype=float)
        if start.shape != (lattice.dim,) or end.shape != (lattice.dim,):
            raise ValueError("segment endpoints must match the lattice dimension")
        if count < 2:
            raise ValueError("each segment needs count >= 2")
        frac = np.linspace(0.0, 1.0, int(count))[:, None]
        pieces.append(start[None, :] * (1.0 - frac) + end[None, :] * frac)
    return np.concatenate(pieces)


def path_coordinate(points: np.ndarray) -> np.ndarray:
    """Cumulative arc length along a wavevector path (0 at the first point)."""
    points = np.asarray(points, dtype=float)
    seglen = np.linalg.norm(np.diff(points, axis=0), axis=1)
    return np.concatenate([[0.0], np.cumsum(seglen)])
