"""Cavity-mediated magnon-transmon coupling and Rabi observables.

The probed magnon mode, the microwave cavity mode, and the transmon qubit
form a three-mode chain with exchange couplings g_mph (magnon-photon) and
g_phq (photon-qubit).  A Schrieffer-Wolff rotation eliminates the cavity to
first order, leaving dressed frequencies, an effective magnon-qubit coupling
g_mq, and Rabi oscillations whose zero-detuning angular frequency is
proportional to the EPR function of the magnon ground state -- the handle
that turns a qubit spectroscopy signal into an entanglement measurement.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, replace

from .bogoliubov import SqueezeParams
from .entanglement import epr_function, ground_state_entropy_closed_form
from .errors import BranchError, ResonanceError

#: Dispersive ratio above which the first-order reduction is flagged.
DISPERSIVE_WARN = 0.1

#: E_J/E_C below which the two-level reduction of the transmon is doubtful.
TRANSMON_RATIO_WARN = 20.0


@dataclass(frozen=True)
class TransmonParams:
    """Transmon spectrum derived from charging and Josephson energies."""

    E_C: float
    E_J: float
    omega_q: float
    xi: float
    in_transmon_regime: bool


def transmon_spectrum(E_C: float, E_J: float) -> TransmonParams:
    """Qubit frequency omega_q = sqrt(8 E_C E_J) - E_C and anharmonicity
    xi = E_C; flags the result when E_J/E_C < 20."""
    if E_C <= 0 or E_J <= 0:
        raise ValueError("E_C and E_J must be positive")
    ratio = E_J / E_C
    if ratio < TRANSMON_RATIO_WARN:
        warnings.warn(
            f"E_J/E_C = {ratio:.3g} < {TRANSMON_RATIO_WARN:g}: outside the "
            "transmon regime heuristic", stacklevel=2)
    return TransmonParams(E_C=E_C, E_J=E_J,
                          omega_q=math.sqrt(8.0 * E_C * E_J) - E_C,
                          xi=E_C, in_transmon_regime=ratio >= TRANSMON_RATIO_WARN)


@dataclass(frozen=True)
class HybridParams:
    """Three-mode chain parameters before the Schrieffer-Wolff reduction.

    ``omega_alpha``/``omega_q`` may be left None by :func:`couplings` and
    filled in later with :func:`dataclasses.replace`.
    """

    omega_c: float
    g_mph: complex
    g_phq: complex
    lam: float
    A0: float
    d: float
    phase_kr: float
    omega_alpha: float | None = None
    omega_q: float | None = None

    def dispersive_ratio(self) -> float:
        """max coupling over min cavity detuning; small values validate the
        first-order reduction."""
        self._require_frequencies()
        dmin = min(abs(self.omega_alpha - self.omega_c),
                   abs(self.omega_q - self.omega_c))
        if dmin == 0.0:
            return math.inf
        return max(abs(self.g_mph), abs(self.g_phq)) / dmin

    def _require_frequencies(self):
        if self.omega_alpha is None or self.omega_q is None:
            raise ValueError("omega_alpha and omega_q must be set")


def couplings(k: float, A0: float, S: float, sp: SqueezeParams, d: float,
              omega_c: float, phase_kr: float = 0.0,
              omega_alpha: float | None = None,
              omega_q: float | None = None) -> HybridParams:
    """Cavity couplings at wavevector magnitude k.

    lam = A0*k*sqrt(S), g_mph = lam*(u + v*), g_phq = -i*d*omega_c*e^{-i k.r}.
    The squeezing of the magnon pair enters the coupling magnitude through
    |u + v*|^2, which equals the ground-state EPR function.
    """
    if A0 < 0 or S <= 0 or d < 0 or omega_c < 0 or k < 0:
        raise ValueError("coupling magnitudes must be nonnegative (S > 0)")
    lam = A0 * k * math.sqrt(S)
    return HybridParams(
        omega_c=omega_c,
        g_mph=lam * sp.coupling_amplitude,
        g_phq=-1j * d * omega_c * cmath.exp(-1j * phase_kr),
        lam=lam, A0=A0, d=d, phase_kr=phase_kr,
        omega_alpha=omega_alpha, omega_q=omega_q)


@dataclass(frozen=True)
class DressedParams:
    """Dressed frequencies and effective magnon-qubit coupling after the
    Schrieffer-Wolff rotation; ``detuning`` is (omega_alpha' - omega_q')/2."""

    omega_c_p: float
    omega_alpha_p: float
    omega_q_p: float
    g_mq: complex
    detuning: float
    dispersive_ratio: float


def schrieffer_wolff(h: HybridParams, eps: float = 1e-9) -> DressedParams:
    """First-order Schrieffer-Wolff reduction of the three-mode chain.

    omega_c' = omega_c - |g_mph|^2/D_m - |g_phq|^2/D_q,
    omega_alpha' = omega_alpha + |g_mph|^2/D_m,
    omega_q' = omega_q + |g_phq|^2/D_q,
    g_mq = (1/2) g_mph g_phq (1/D_m + 1/D_q),

    with D_m = omega_alpha - omega_c and D_q = omega_q - omega_c.  The 1/2 in
    g_mq is fixed by requiring the effective block spectrum to agree with
    exact diagonalisation to better than quadratic order in the couplings.
    Raises ResonanceError when either detuning magnitude falls below ``eps``.
    """
    h._require_frequencies()
    D_m = h.omega_alpha - h.omega_c
    D_q = h.omega_q - h.omega_c
    if abs(D_m) < eps or abs(D_q) < eps:
        raise ResonanceError(
            f"cavity detunings ({D_m:.3g}, {D_q:.3g}) below eps = {eps:g}")
    ratio = h.dispersive_ratio()
    if ratio > DISPERSIVE_WARN:
        warnings.warn(
            f"dispersive ratio {ratio:.3g} > {DISPERSIVE_WARN:g}: "
            "first-order reduction may be inaccurate", stacklevel=2)
    shift_m = abs(h.g_mph) ** 2 / D_m
    shift_q = abs(h.g_phq) ** 2 / D_q
    omega_alpha_p = h.omega_alpha + shift_m
    omega_q_p = h.omega_q + shift_q
    return DressedParams(
        omega_c_p=h.omega_c - shift_m - shift_q,
        omega_alpha_p=omega_alpha_p,
        omega_q_p=omega_q_p,
        g_mq=0.5 * h.g_mph * h.g_phq * (1.0 / D_m + 1.0 / D_q),
        detuning=0.5 * (omega_alpha_p - omega_q_p),
        dispersive_ratio=ratio)


@dataclass(frozen=True)
class RabiObservables:
    """Rabi oscillation data in the n-excitation block: complex amplitude
    Omega = g_mq, angular frequency f, transfer intensity in [0, 1], and the
    mixing angle theta."""

    Omega: complex
    f: float
    intensity: float
    theta: float
    n: int


def effective_qubit(dp: DressedParams, n: int = 1) -> RabiObservables:
    """Observables of the 2x2 block spanned by |n, 0> and |n-1, 1>.

    f = sqrt(detuning^2 + n |Omega|^2) and intensity
    I = n |Omega|^2 / f^2 (so I = 1 iff detuning = 0); the sqrt(n) coupling
    enhancement enters both.
    """
    if n < 1:
        raise ValueError("block index n must be >= 1")
    g = abs(dp.g_mq)
    f2 = dp.detuning ** 2 + n * g * g
    f = math.sqrt(f2)
    intensity = n * g * g / f2 if f2 > 0 else 0.0
    return RabiObservables(Omega=dp.g_mq, f=f, intensity=intensity,
                           theta=math.atan2(math.sqrt(n) * g, dp.detuning),
                           n=n)


def block_eigenvalues(dp: DressedParams, n: int = 1) -> tuple[float, float]:
    """Eigenvalues of the 2x2 block: n*omega_alpha' - detuning +/- f.

    (Shifting both by +detuning gives the symmetric form
    n*omega_alpha' +/- f of the level-shifted single-qubit Hamiltonian.)
    """
    ro = effective_qubit(dp, n)
    mid = n * dp.omega_alpha_p - dp.detuning
    return (mid + ro.f, mid - ro.f)


def rabi_probability(t, ro: RabiObservables):
    """Excitation transfer probability I sin^2(f t); accepts scalar or array t."""
    import numpy as np

    return ro.intensity * np.sin(ro.f * np.asarray(t)) ** 2


def rabi_frequency_zero_detuning(lam: float, omega_q: float, omega_c: float,
                                 sp: SqueezeParams, eps: float = 1e-9) -> float:
    """Rabi angular frequency at zero detuning: lam^2 Delta[psi_00]/|omega_q - omega_c|.

    Assumes the probe tuned to omega_q = omega_alpha and |g_phq| = |g_mph|;
    then f equals |g_mq| and is directly proportional to the ground-state
    EPR function.
    """
    den = abs(omega_q - omega_c)
    if den < eps:
        raise ResonanceError("qubit resonant with the cavity")
    return lam * lam * epr_function(sp) / den


@dataclass(frozen=True)
class InversionResult:
    """Squeezing data inferred from a measured zero-detuning Rabi frequency."""

    delta_epr: float
    r: float
    ground_entropy: float
    nonlocal_: bool
    r_linearized: float


#: Slack on the Delta = 1 boundary when checking branch consistency, so a
#: round-tripped r = 0 does not trip the check through rounding.
BRANCH_TOL = 1e-12


def invert_rabi(f_measured: float, lam: float, omega_q: float, omega_c: float,
                phi: float, eps: float = 1e-9) -> InversionResult:
    """Invert a measured zero-detuning Rabi frequency into (Delta, r, entropy).

    Delta = f |omega_q - omega_c| / lam^2 and r = |ln Delta|/2 (the exact
    inversion of the exponential branches; the small-r linearisation
    r = |Delta - 1|/2 is reported alongside for comparison).  The declared
    phi branch must be consistent: phi = pi requires Delta <= 1 and phi = 0
    requires Delta >= 1, otherwise BranchError.
    """
    if f_measured <= 0:
        raise ValueError("f_measured must be positive")
    if lam <= 0:
        raise ValueError("lam must be positive")
    den = abs(omega_q - omega_c)
    if den < eps:
        raise ResonanceError("qubit resonant with the cavity")
    if not (abs(phi) <= BRANCH_TOL or abs(phi - math.pi) <= BRANCH_TOL):
        raise ValueError("phi must be 0 or pi (real coupling ratio)")
    delta = f_measured * den / (lam * lam)
    on_pi_branch = abs(phi - math.pi) <= BRANCH_TOL
    if on_pi_branch and delta > 1.0 + BRANCH_TOL:
        raise BranchError(
            f"Delta = {delta:.6g} > 1 is inconsistent with phi = pi "
            "(nonlocal branch requires Delta <= 1)")
    if not on_pi_branch and delta < 1.0 - BRANCH_TOL:
        raise BranchError(
            f"Delta = {delta:.6g} < 1 is inconsistent with phi = 0 "
            "(local branch requires Delta >= 1)")
    r = 0.5 * abs(math.log(delta))
    return InversionResult(delta_epr=delta, r=r,
                           ground_entropy=ground_state_entropy_closed_form(r),
                           nonlocal_=delta < 1.0,
                           r_linearized=0.5 * abs(delta - 1.0))


def zero_detuned_params(omega_mode: float, omega_c: float, lam: float,
                        sp: SqueezeParams, phase_kr: float = 0.0) -> HybridParams:
    """Hybrid parameters with the probe tuned to zero detuning against the
    magnon branch at ``omega_mode``: omega_q = omega_mode and the dipole
    chosen so |g_phq| = |g_mph|."""
    g_mag = lam * abs(sp.coupling_amplitude)
    d = g_mag / omega_c if omega_c > 0 else 0.0
    hp = couplings(k=1.0, A0=lam, S=1.0, sp=sp, d=d, omega_c=omega_c,
                   phase_kr=phase_kr)
    return replace(hp, omega_alpha=omega_mode, omega_q=omega_mode)
