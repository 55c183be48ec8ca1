"""SU(1,1) Bogoliubov transformation of the sublattice magnon pair.

The pair Hamiltonian with coupling ratio Gamma is diagonalised by a two-mode
squeeze with hyperbolic angle r and phase phi:

    r   = atanh[(1 - sqrt(1 - |Gamma|^2)) / |Gamma|],
    phi = pi - arg(Gamma),
    u   = cosh(r),   v = sinh(r) * exp(i*phi),

where (a, b^dag)^T = [[u, v], [v*, u*]] (alpha, beta^dag)^T.  r is the single
knob controlling two-mode squeezing and entanglement downstream.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import InstabilityError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class SqueezeParams:
    """Squeezing data (r, phi) and the Bogoliubov coefficients (u, v).

    Invariant: |u|^2 - |v|^2 = 1 with u = cosh(r) real and
    v = sinh(r)*exp(i*phi).
    """

    r: float
    phi: float
    u: float
    v: complex

    @classmethod
    def from_r_phi(cls, r: float, phi: float) -> "SqueezeParams":
        if r < 0:
            raise ValueError("squeezing parameter r must be >= 0")
        phi = phi % TWO_PI
        return cls(r=r, phi=phi, u=math.cosh(r),
                   v=math.sinh(r) * cmath.exp(1j * phi))

    @property
    def coupling_amplitude(self) -> complex:
        """u + v*, the amplitude entering the magnon-photon coupling."""
        return self.u + self.v.conjugate()


def squeeze_params(Gamma: complex) -> SqueezeParams:
    """Squeezing data for a coupling ratio Gamma with |Gamma| < 1.

    For Gamma = 0 the transform is the identity; phi is then fixed to pi by
    convention (the continuation of the Gamma > 0 branch), so that the EPR
    function degrades gracefully to 1.
    """
    Gamma = complex(Gamma)
    mag = abs(Gamma)
    if mag >= 1.0:
        raise InstabilityError(f"|Gamma| = {mag:.6g} >= 1: no stable transform")
    if mag == 0.0:
        return SqueezeParams.from_r_phi(0.0, math.pi)
    # atanh[(1 - sqrt(1-m^2))/m] == atanh(m)/2 identically (tanh 2r = m);
    # the right-hand form is cancellation-free at both ends.  For |Gamma|
    # within ~1e-12 of 1 the distance to 1 is no longer resolvable in
    # binary64 and r itself carries the corresponding loss of precision.
    r = 0.5 * math.atanh(mag)
    phi = math.pi - cmath.phase(Gamma)
    return SqueezeParams.from_r_phi(r, phi)


def gamma_from_squeeze(sp: SqueezeParams) -> complex:
    """Coupling ratio reproducing sp: Gamma = tanh(2r) * exp(i*(pi - phi))."""
    return math.tanh(2.0 * sp.r) * cmath.exp(1j * (math.pi - sp.phi))


def bogoliubov_rotate(sp: SqueezeParams) -> np.ndarray:
    """2x2 matrix [[u, v], [v*, u*]] mapping (a, b^dag) to (alpha, beta^dag).

    Symplectic: det = |u|^2 - |v|^2 = 1, so the inverse is
    [[u*, -v], [-v*, u]].
    """
    u, v = complex(sp.u), sp.v
    return np.array([[u, v], [v.conjugate(), u.conjugate()]])
