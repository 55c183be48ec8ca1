"""Brute-force oracle on truncated multi-mode bosonic Fock spaces.

Everything the analytic modules claim is re-derivable here by exact matrix
algebra: Hamiltonian assembly, diagonalisation, reduced-density-matrix
entropies, EPR quadrature variances, Schrieffer-Wolff generator residuals,
and unitary time evolution.  Operators are plain ``scipy.sparse`` matrices
over a :class:`FockSpace`; dense spectral methods are used below
``DENSE_LIMIT`` total dimensions and sparse extremal eigensolvers (with
residual certificates) above.

Basis ordering is row-major in the mode occupations: the first mode varies
slowest, matching ``kron`` of the single-mode operators in listed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
import scipy.sparse.linalg as spla
from scipy.linalg import eigh
from scipy.optimize import minimize_scalar

from .errors import NormalizationError, TruncationError
from .hybrid import HybridParams
from .bogoliubov import SqueezeParams
from .model import KittelModes

DENSE_LIMIT = 4096
DEFAULT_CAP = 2 ** 20


@dataclass(frozen=True)
class FockSpace:
    """Truncated product Fock space with per-mode dimensions and labels."""

    mode_dims: tuple
    mode_labels: tuple
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        object.__setattr__(self, "mode_dims", tuple(int(d) for d in self.mode_dims))
        object.__setattr__(self, "mode_labels", tuple(self.mode_labels))
        if len(self.mode_dims) != len(self.mode_labels):
            raise ValueError("one label per mode required")
        if len(set(self.mode_labels)) != len(self.mode_labels):
            raise ValueError("mode labels must be unique")
        if any(d < 2 for d in self.mode_dims):
            raise ValueError("every mode needs dimension >= 2")
        if self.total_dim > self.cap:
            raise TruncationError(
                f"total dimension {self.total_dim} exceeds cap {self.cap}")

    @property
    def total_dim(self) -> int:
        return int(np.prod(self.mode_dims))

    def mode_index(self, mode) -> int:
        if isinstance(mode, str):
            return self.mode_labels.index(mode)
        return int(mode)

    def occupations(self) -> np.ndarray:
        """(total_dim, n_modes) table of basis occupations."""
        grids = np.unravel_index(np.arange(self.total_dim), self.mode_dims)
        return np.stack(grids, axis=1)

    def basis_index(self, occ) -> int:
        return int(np.ravel_multi_index(tuple(int(n) for n in occ), self.mode_dims))


@dataclass(frozen=True)
class FockState:
    """Complex amplitude vector over a FockSpace."""

    space: FockSpace
    amplitudes: np.ndarray

    @property
    def norm_deficit(self) -> float:
        return abs(1.0 - float(np.linalg.norm(self.amplitudes)))


def basis_state(space: FockSpace, occ) -> FockState:
    amps = np.zeros(space.total_dim, dtype=complex)
    amps[space.basis_index(occ)] = 1.0
    return FockState(space=space, amplitudes=amps)


def _lowering(dim: int) -> sparse.csr_matrix:
    return sparse.diags(np.sqrt(np.arange(1, dim)), 1, format="csr").astype(complex)


def annihilation(space: FockSpace, mode) -> sparse.csr_matrix:
    """Lowering operator of one mode, tensored with identities elsewhere."""
    j = space.mode_index(mode)
    op = sparse.identity(1, format="csr", dtype=complex)
    for i, d in enumerate(space.mode_dims):
        factor = _lowering(d) if i == j else sparse.identity(d, format="csr", dtype=complex)
        op = sparse.kron(op, factor, format="csr")
    return op


def creation(space: FockSpace, mode) -> sparse.csr_matrix:
    return annihilation(space, mode).conj().T.tocsr()


def number_operator(space: FockSpace, mode) -> sparse.csr_matrix:
    # exact integer diagonal, not a^dag a (whose sqrt(n)^2 entries round)
    j = space.mode_index(mode)
    return sparse.diags(space.occupations()[:, j].astype(complex), format="csr")


def total_number(space: FockSpace) -> sparse.csr_matrix:
    return sparse.diags(space.occupations().sum(axis=1).astype(complex),
                        format="csr")


def sector_indices(space: FockSpace, total: int) -> np.ndarray:
    """Basis indices with total occupation ``total`` (an exact sector of any
    excitation-conserving Hamiltonian)."""
    return np.nonzero(space.occupations().sum(axis=1) == total)[0]


def commutator(A, B):
    return A @ B - B @ A


def hermiticity_defect(H) -> float:
    return spla.norm(H - H.conj().T.tocsr(), np.inf)


# ---------------------------------------------------------------------------
# two-mode magnon pair


def two_mode_space(N: int) -> FockSpace:
    return FockSpace(mode_dims=(N, N), mode_labels=("a", "b"))


def two_mode_hamiltonian(km: KittelModes, N: int) -> sparse.csr_matrix:
    """omega_a n_a + omega_b n_b + g_mm a b + g_mm* a^dag b^dag on the N x N
    truncated pair space."""
    if N < 2:
        raise ValueError("N must be >= 2")
    space = two_mode_space(N)
    a = annihilation(space, "a")
    b = annihilation(space, "b")
    g = complex(km.g_mm)
    H = (km.omega_a * (a.conj().T @ a) + km.omega_b * (b.conj().T @ b)
         + g * (a @ b) + np.conj(g) * (a.conj().T @ b.conj().T))
    return H.tocsr()


def _pair_difference_indices(space: FockSpace, d: int) -> np.ndarray:
    occ = space.occupations()
    return np.nonzero(occ[:, 0] - occ[:, 1] == d)[0]


def _phase_fixed(space: FockSpace, vec: np.ndarray) -> np.ndarray:
    """Global phase fixed by making the largest-magnitude amplitude (the
    all-vacuum one, for ground states) real positive."""
    anchor = vec[0] if abs(vec[0]) > 1e-12 else vec[np.argmax(np.abs(vec))]
    return vec * (abs(anchor) / anchor)


def ground_state(H, space: FockSpace, tol: float = 1e-9) -> FockState:
    """Lowest eigenvector of a Hermitian matrix over ``space``: dense
    diagonalisation below DENSE_LIMIT, Lanczos with a deterministic start
    vector above; either way the eigenpair carries a residual certificate."""
    dim = H.shape[0]
    if dim <= DENSE_LIMIT:
        evals, evecs = eigh(H.toarray() if sparse.issparse(H) else np.asarray(H))
        energy, vec = evals[0], evecs[:, 0].astype(complex)
    else:
        v0 = np.full(dim, 1.0 / math.sqrt(dim))
        evals, evecs = spla.eigsh(H, k=1, which="SA", v0=v0)
        energy, vec = evals[0], evecs[:, 0].astype(complex)
    residual = np.linalg.norm(H @ vec - energy * vec)
    scale = spla.norm(H, np.inf) if sparse.issparse(H) else np.linalg.norm(H, np.inf)
    if residual > tol * scale:
        raise TruncationError(
            f"eigenpair residual {residual:.3g} above {tol:g} * |H|")
    return FockState(space=space, amplitudes=_phase_fixed(space, vec))


def two_mode_ground_state(km: KittelModes, N: int, tol: float = 1e-9) -> FockState:
    """Numerical ground state of :func:`two_mode_hamiltonian`.

    The pair Hamiltonian conserves n_a - n_b and its ground state lies in
    the balanced sector, so the minimisation runs over that N-dimensional
    block of the assembled matrix; the result carries a residual certificate
    against the full matrix.
    """
    space = two_mode_space(N)
    H = two_mode_hamiltonian(km, N)
    idx = _pair_difference_indices(space, 0)
    block = H[np.ix_(idx, idx)].toarray()
    evals, evecs = eigh(block)
    vec = np.zeros(space.total_dim, dtype=complex)
    vec[idx] = evecs[:, 0]
    vec = _phase_fixed(space, vec)
    residual = np.linalg.norm(H @ vec - evals[0] * vec)
    scale = spla.norm(H, np.inf)
    if residual > tol * scale:
        raise TruncationError(
            f"ground-state residual {residual:.3g} above {tol:g} * |H|")
    return FockState(space=space, amplitudes=vec)


def single_excitation_frequencies(km: KittelModes, N: int) -> tuple[float, float]:
    """(omega_alpha, omega_beta) read off the truncated pair Hamiltonian as
    the lowest excitation energies in the n_a - n_b = +1 and -1 sectors."""
    space = two_mode_space(N)
    H = two_mode_hamiltonian(km, N)
    energies = {}
    for d in (0, 1, -1):
        idx = _pair_difference_indices(space, d)
        energies[d] = eigh(H[np.ix_(idx, idx)].toarray(), eigvals_only=True)[0]
    return energies[1] - energies[0], energies[-1] - energies[0]


def mode_rotation_operators(space: FockSpace, sp: SqueezeParams):
    """Creation operators of the hybridised modes on the pair space:
    alpha^dag = u a^dag - v* b and beta^dag = u b^dag - v* a."""
    a = annihilation(space, "a")
    b = annihilation(space, "b")
    vc = np.conj(sp.v)
    alpha_dag = sp.u * a.conj().T - vc * b
    beta_dag = sp.u * b.conj().T - vc * a
    return alpha_dag.tocsr(), beta_dag.tocsr()


def squeezed_eigenstate(x: int, y: int, km: KittelModes, sp: SqueezeParams,
                        N: int, tol: float = 1e-8):
    """(alpha^dag)^x (beta^dag)^y applied to the numerical ground state,
    normalised.  Returns ``(state, residual)`` with the eigen-residual
    |H psi - E psi| measured against the full truncated Hamiltonian
    (E from the Rayleigh quotient); raises TruncationError when the residual
    exceeds ``tol * |H|``."""
    state = two_mode_ground_state(km, N)
    space = state.space
    alpha_dag, beta_dag = mode_rotation_operators(space, sp)
    vec = state.amplitudes.copy()
    for _ in range(x):
        vec = alpha_dag @ vec
    for _ in range(y):
        vec = beta_dag @ vec
    nrm = np.linalg.norm(vec)
    if nrm == 0:
        raise TruncationError("excited state annihilated by truncation")
    vec = vec / nrm
    H = two_mode_hamiltonian(km, N)
    energy = np.real(np.vdot(vec, H @ vec))
    residual = np.linalg.norm(H @ vec - energy * vec)
    scale = spla.norm(H, np.inf)
    if residual > tol * scale:
        raise TruncationError(
            f"eigen-residual {residual:.3g} above {tol:g} * |H| for "
            f"(x, y) = ({x}, {y}); increase N")
    return FockState(space=space, amplitudes=vec), residual


def two_mode_squeeze_operator(sp: SqueezeParams, N: int) -> np.ndarray:
    """Dense unitary exp(xi* a b - xi a^dag b^dag) with xi = r e^{i phi};
    conjugating the pair Hamiltonian with it removes the anomalous terms up
    to truncation-boundary corrections."""
    space = two_mode_space(N)
    a = annihilation(space, "a")
    b = annihilation(space, "b")
    xi = sp.r * np.exp(1j * sp.phi)
    K = np.conj(xi) * (a @ b) - xi * (a.conj().T @ b.conj().T)
    evals, evecs = np.linalg.eigh((1j * K).toarray())
    return (evecs * np.exp(-1j * evals)) @ evecs.conj().T


# ---------------------------------------------------------------------------
# entropies and EPR variances


def reduced_entropy(state: FockState, keep_modes, base: float | None = None) -> float:
    """Entanglement entropy of the reduced state on ``keep_modes`` versus the
    rest, from the Schmidt values of the reshaped amplitude matrix."""
    if state.norm_deficit > 1e-8:
        raise NormalizationError(
            f"state norm deficit {state.norm_deficit:.3g} too large")
    space = state.space
    keep = [space.mode_index(m) for m in np.atleast_1d(keep_modes)]
    rest = [i for i in range(len(space.mode_dims)) if i not in keep]
    if not keep or not rest:
        raise ValueError("keep_modes must be a proper nonempty subset")
    tensor = state.amplitudes.reshape(space.mode_dims)
    tensor = np.transpose(tensor, keep + rest)
    d_keep = int(np.prod([space.mode_dims[i] for i in keep]))
    svals = np.linalg.svd(tensor.reshape(d_keep, -1), compute_uv=False)
    lam = svals ** 2
    lam = lam[lam > 1e-300]
    lam = lam / lam.sum()
    entropy = float(-(lam * np.log(lam)).sum())
    if base is not None:
        entropy /= math.log(base)
    return entropy if entropy > 0.0 else 0.0


def epr_variance(state: FockState, modes=("a", "b")) -> float:
    """EPR function (Var(X_A + X_B) + Var(P_A - P_B)) / 2 evaluated from the
    quadrature operators X = (a + a^dag)/sqrt(2), P = (a - a^dag)/(i sqrt(2))
    of the two designated modes."""
    space = state.space
    a = annihilation(space, modes[0])
    b = annihilation(space, modes[1])
    x_sum = (a + a.conj().T + b + b.conj().T) / math.sqrt(2.0)
    p_diff = (a - a.conj().T - b + b.conj().T) / (1j * math.sqrt(2.0))
    psi = state.amplitudes

    def variance(op):
        mean = np.vdot(psi, op @ psi)
        mean_sq = np.vdot(psi, op @ (op @ psi))
        return np.real(mean_sq - mean * mean)

    return 0.5 * (variance(x_sum) + variance(p_diff))


# ---------------------------------------------------------------------------
# three-mode hybrid chain


def hybrid_space(n_magnon: int, n_cavity: int) -> FockSpace:
    """Magnon and cavity bosons plus a two-level qubit."""
    return FockSpace(mode_dims=(n_magnon, n_cavity, 2),
                     mode_labels=("alpha", "cavity", "qubit"))


def _hybrid_ops(h: HybridParams, dims):
    h._require_frequencies()
    space = hybrid_space(*dims)
    al = annihilation(space, "alpha")
    c = annihilation(space, "cavity")
    q = annihilation(space, "qubit")
    H0 = (h.omega_alpha * (al.conj().T @ al)
          + h.omega_c * (c.conj().T @ c)
          + h.omega_q * (q.conj().T @ q))
    V = -(h.g_mph * (c.conj().T @ al) + h.g_phq * (q.conj().T @ c))
    V = V + V.conj().T
    return space, H0.tocsr(), V.tocsr(), al, c, q


def hybrid_hamiltonian(h: HybridParams, dims=(3, 3)) -> sparse.csr_matrix:
    """Full chain Hamiltonian on (n_magnon, n_cavity, qubit=2) truncations;
    the decoupled second magnon branch is omitted."""
    _, H0, V, *_ = _hybrid_ops(h, dims)
    return (H0 + V).tocsr()


def sw_generator(h: HybridParams, dims=(3, 3)) -> sparse.csr_matrix:
    """Anti-Hermitian Schrieffer-Wolff generator
    W = g_mph/(omega_alpha - omega_c) c^dag alpha
      - g_phq/(omega_q - omega_c) qubit^dag c  -  h.c."""
    _, _, _, al, c, q = _hybrid_ops(h, dims)
    w1 = h.g_mph / (h.omega_alpha - h.omega_c)
    w2 = h.g_phq / (h.omega_q - h.omega_c)
    A = w1 * (c.conj().T @ al) - w2 * (q.conj().T @ c)
    return (A - A.conj().T).tocsr()


def generator_residual(h: HybridParams, dims=(3, 3), where: str = "single") -> float:
    """Frobenius norm of V + [W, H0] restricted to ``where``: the
    single-excitation sector (``"single"``), the truncation-safe interior one
    quantum below every bosonic boundary (``"interior"``), or the whole
    space (``"full"``)."""
    space, H0, V, *_ = _hybrid_ops(h, dims)
    W = sw_generator(h, dims)
    R = (V + commutator(W, H0)).tocsr()
    if where == "single":
        idx = sector_indices(space, 1)
    elif where == "interior":
        occ = space.occupations()
        safe = (occ[:, 0] < dims[0] - 1) & (occ[:, 1] < dims[1] - 1)
        idx = np.nonzero(safe)[0]
    elif where == "full":
        idx = np.arange(space.total_dim)
    else:
        raise ValueError(f"unknown restriction {where!r}")
    return float(np.linalg.norm(R[np.ix_(idx, idx)].toarray()))


# ---------------------------------------------------------------------------
# time evolution and Rabi extraction


def _spectral(H):
    H = H.toarray() if sparse.issparse(H) else np.asarray(H)
    defect = np.linalg.norm(H - H.conj().T)
    if defect > 1e-12 * max(1.0, np.linalg.norm(H)):
        raise ValueError(f"Hamiltonian not Hermitian (defect {defect:.3g})")
    return np.linalg.eigh(H)


def evolve(state: FockState, H, t: float) -> FockState:
    """exp(-i H t) |state> by spectral decomposition (exact for constant H)."""
    evals, evecs = _spectral(H)
    coeff = evecs.conj().T @ state.amplitudes
    amps = evecs @ (np.exp(-1j * evals * t) * coeff)
    return FockState(space=state.space, amplitudes=amps)


def evolve_series(state: FockState, H, times) -> np.ndarray:
    """Amplitudes at each time, shape (len(times), total_dim); one spectral
    decomposition serves the whole series."""
    evals, evecs = _spectral(H)
    coeff = evecs.conj().T @ state.amplitudes
    phases = np.exp(-1j * np.outer(np.asarray(times), evals))
    return (phases * coeff) @ evecs.T


def transfer_probability(series: np.ndarray, space: FockSpace, occ) -> np.ndarray:
    """|<occ | psi(t)>|^2 along an evolve_series result."""
    return np.abs(series[:, space.basis_index(occ)]) ** 2


def extract_rabi(times, probs) -> tuple[float, float]:
    """Estimate (f, intensity) from a sampled oscillation I sin^2(f t).

    Discrete-spectrum peak at angular frequency 2f, refined by maximising the
    continuous periodogram; intensity from the max - min envelope.  A flat
    signal returns (nan, 0.0).
    """
    times = np.asarray(times, dtype=float)
    probs = np.asarray(probs, dtype=float)
    if len(times) < 8:
        raise ValueError("need at least 8 samples")
    dt = np.diff(times)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=0):
        raise ValueError("extract_rabi requires uniform sampling")
    intensity = float(probs.max() - probs.min())
    signal = probs - probs.mean()
    if intensity < 1e-12:
        return math.nan, 0.0
    # Hann window suppresses the leakage bias of a non-integer period count
    window = np.hanning(len(times))
    tapered = signal * window
    spectrum = np.abs(np.fft.rfft(tapered))
    freqs = 2.0 * math.pi * np.fft.rfftfreq(len(times), d=dt[0])
    peak = int(np.argmax(spectrum[1:])) + 1

    def negative_power(omega):
        return -abs(np.sum(tapered * np.exp(-1j * omega * times)))

    lo = freqs[max(peak - 1, 1)]
    hi = freqs[min(peak + 1, len(freqs) - 1)]
    result = minimize_scalar(negative_power, bounds=(lo, hi), method="bounded",
                             options={"xatol": 1e-12 * max(freqs[peak], 1.0)})
    return float(result.x) / 2.0, intensity
