"""Truncated-Fock-basis realization of the kicked harmonic oscillator:
Floquet operator construction, state propagation, quasienergy spectra, and
phase-space observables.

The kick factor is built by diagonalizing the (Hermitian, tridiagonal)
quadrature operator eta*(a + a^dag) once per (eta, D) and exponentiating on
its spectrum, so it is exactly unitary regardless of truncation.  Interior-
block comparisons between operator identities use a light-cone block: only
states whose phase-space radius sits more than a fixed buffer inside the
truncation edge sqrt(D) are compared, since edge effects propagate inward
by roughly the total displacement reach of the operators involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import specfun
from .model import ResonanceKind, SystemParams, classify

DEFAULT_LEAK_TOL = 1e-8
DEFAULT_EDGE_BUFFER = 8.0  # phase-space radius units, see interior_block
EIGVAL_DISCARD_TOL = 1e-6


class EigensolverError(RuntimeError):
    """Dense eigensolver failed; message carries a condition diagnostic."""


@dataclass
class FockVector:
    """Complex amplitudes over number states |0..D-1>."""

    amps: np.ndarray

    @property
    def dim(self) -> int:
        return self.amps.shape[0]

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def leak(self) -> float:
        """Population in the top tenth of the basis (truncation health)."""
        d = self.dim
        return float(np.sum(np.abs(self.amps[d - d // 10:]) ** 2))


@dataclass
class FloquetMatrix:
    """Dense one-kick evolution operator with its parameter snapshot."""

    matrix: np.ndarray
    params: SystemParams

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass
class EvolveResult:
    state: FockVector
    energies: np.ndarray  # mean energy before kick 0, 1, ..., n_kicks
    truncation_unsafe: bool
    first_unsafe_kick: int | None = None


@dataclass
class KicksToEnergyResult:
    n_kicks: int | None  # smallest N with E(N) >= target, None if exhausted
    reached: bool
    energies: np.ndarray
    truncation_unsafe: bool
    first_unsafe_kick: int | None = None


@dataclass
class QGrid:
    """Sampled Husimi distribution over a rectangular phase-space window.

    values[i_im, i_re] = Q(re_axis[i_re] + 1j*im_axis[i_im]).
    """

    re_min: float
    re_max: float
    im_min: float
    im_max: float
    values: np.ndarray

    @property
    def re_axis(self) -> np.ndarray:
        return np.linspace(self.re_min, self.re_max, self.values.shape[1])

    @property
    def im_axis(self) -> np.ndarray:
        return np.linspace(self.im_min, self.im_max, self.values.shape[0])

    def riemann_sum(self) -> float:
        n_im, n_re = self.values.shape
        dre = (self.re_max - self.re_min) / (n_re - 1)
        dim_ = (self.im_max - self.im_min) / (n_im - 1)
        return float(np.sum(self.values) * dre * dim_)

    def second_moment(self) -> float:
        """Q-weighted mean of |alpha|^2, normalized over the window."""
        rr, ii = np.meshgrid(self.re_axis, self.im_axis)
        w = np.sum(self.values)
        return float(np.sum(self.values * (rr ** 2 + ii ** 2)) / w)


@dataclass(frozen=True)
class QuasienergyRecord:
    phi: float  # eigenphase in (-pi, pi]
    ground_overlap: float  # |<eigvec|0>|^2


@dataclass
class SpectrumResult:
    records: list[QuasienergyRecord]
    n_discarded: int
    params: SystemParams | None = None
    dim: int = 0
    max_unit_defect: float = 0.0  # max ||lambda|-1| among retained eigenvalues


def ground_state(dim: int) -> FockVector:
    amps = np.zeros(dim, dtype=complex)
    amps[0] = 1.0
    return FockVector(amps)


def coherent_state(alpha: complex, dim: int) -> FockVector:
    """Fock expansion of |alpha>, renormalized over the truncated basis."""
    amps = specfun.coherent_fock(alpha, dim)
    return FockVector(amps / np.linalg.norm(amps))


def mean_energy(state: FockVector) -> float:
    """<n + 1/2> in units of hbar*omega."""
    n = np.arange(state.dim)
    return float(np.sum(np.abs(state.amps) ** 2 * (n + 0.5)))


def fidelity(a: FockVector, b: FockVector) -> float:
    return float(abs(np.vdot(a.amps, b.amps)) ** 2)


# ---------------------------------------------------------------------------
# operator construction


def build_kick(params: SystemParams, dim: int, strength: int = 1,
               theta: float = 0.0) -> np.ndarray:
    """Kick factor exp(i*zeta*strength*cos[eta*(a e^{-i theta} + a^dag e^{i theta})]).

    theta = 0 gives the plain kick of the Floquet operator; nonzero theta the
    rotated factors of the q-axis product.  Exactly unitary by spectral
    construction.
    """
    off = params.eta * np.sqrt(np.arange(1, dim))
    if theta == 0.0:
        x, vecs = eigh_tridiagonal(np.zeros(dim), off)
        phases = np.exp(1j * params.zeta * strength * np.cos(x))
        return (vecs * phases) @ vecs.T
    gen = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(dim - 1)
    gen[idx, idx + 1] = off * np.exp(-1j * theta)
    gen[idx + 1, idx] = off * np.exp(1j * theta)
    x, vecs = np.linalg.eigh(gen)
    phases = np.exp(1j * params.zeta * strength * np.cos(x))
    return (vecs * phases) @ vecs.conj().T


def build_free(params: SystemParams, dim: int) -> np.ndarray:
    """Free half of the Floquet operator: diag e^{-i(n+1/2) tau}."""
    n = np.arange(dim)
    return np.diag(np.exp(-1j * (n + 0.5) * params.tau))


def floquet(params: SystemParams, dim: int) -> FloquetMatrix:
    """One-kick Floquet operator F = U_free * U_kick."""
    return FloquetMatrix(build_free(params, dim) @ build_kick(params, dim), params)


def floquet_power(params: SystemParams, dim: int, p: int) -> np.ndarray:
    """F^p by repeated multiplication."""
    if p < 0:
        raise ValueError("p must be nonnegative")
    return np.linalg.matrix_power(floquet(params, dim).matrix, p)


def kick_axis_product(params: SystemParams, dim: int, v: int = 1) -> np.ndarray:
    """The q-axis product form of F^q: a sequence of q cosine kicks along
    axes rotated by 2*pi*j*r/q, with kick strength amplified by v.

    Includes the global phase (-1)^{r v} from the free evolution over full
    oscillator periods, which makes the v = 1 case equal F^q exactly.  Each
    rotated factor is diagonalized independently.
    """
    q, r = params.q, params.r
    out = np.eye(dim, dtype=complex) * (-1.0) ** (r * v)
    for j in range(q - 1, -1, -1):
        out = out @ build_kick(params, dim, strength=v, theta=j * params.tau)
    return out


def amplified_kick_operator(params: SystemParams, dim: int, v: int) -> np.ndarray:
    """Single q-fold diffraction with kick strength kappa*v, equal (up to
    global phase) to F^{q v} when eta^2 sits on a quantum resonance."""
    if v < 1:
        raise ValueError("v must be >= 1")
    res = classify(params.eta_sq, params.q)
    if res.kind is not ResonanceKind.RESONANT or res.b != 1:
        from .model import NonresonantError
        raise NonresonantError(
            f"eta_sq={params.eta_sq} is not an integer multiple of the principal "
            f"resonance for q={params.q}; the amplified-kick identity needs one")
    return kick_axis_product(params, dim, v=v)


def kick_expansion_matrix(params: SystemParams, dim: int, v: int = 1,
                          theta: float = 0.0) -> np.ndarray:
    """Kick factor assembled from its displacement-operator expansion,
    sum_k i^k J_k(zeta v) D(i k eta e^{i theta}), with exact matrix elements.

    Independent verification route for build_kick; the k-sum truncates at
    k_cutoff(zeta v).
    """
    zeff = params.zeta * v
    kc = specfun.k_cutoff(zeff)
    out = np.zeros((dim, dim), dtype=complex)
    for k in range(-kc, kc + 1):
        jk = specfun.bessel_j(k, zeff)
        if jk == 0.0:
            continue
        disp = specfun.displacement_matrix(1j * k * params.eta * np.exp(1j * theta), dim)
        out += (1j) ** k * jk * disp
    return out


# ---------------------------------------------------------------------------
# interior-block comparison helpers


def interior_block(dim: int, buffer: float = DEFAULT_EDGE_BUFFER) -> int:
    """Dimension of the truncation-safe block: states with phase-space
    radius sqrt(n) at least `buffer` inside the edge radius sqrt(dim)."""
    root = math.sqrt(dim) - buffer
    if root <= 1.0:
        raise ValueError(f"dim={dim} too small for edge buffer {buffer}")
    return int(root * root)


def interior_max(mat: np.ndarray, block: int) -> float:
    """Max-norm over the leading block x block submatrix."""
    return float(np.abs(mat[:block, :block]).max())


def phase_align(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Rotate a by the global phase that matches b at b's largest element."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    ratio = b[idx] / a[idx]
    return a * (ratio / abs(ratio))


def mismatch_up_to_phase(a: np.ndarray, b: np.ndarray, block: int) -> float:
    """Interior max-norm of (a - b) after aligning global phases."""
    return interior_max(b - phase_align(a, b), block)


def symmetry_commutator_norm(params: SystemParams, dim: int, gen: complex,
                             block: int | None = None) -> float:
    """Interior max-norm of [F^q, D(gen)] for a symmetry-set generator."""
    if gen == 0:
        return 0.0
    if block is None:
        block = interior_block(dim)
    fq = floquet_power(params, dim, params.q)
    dg = specfun.displacement_matrix(gen, dim)
    return interior_max(fq @ dg - dg @ fq, block)


# ---------------------------------------------------------------------------
# propagation and observables


def evolve(state: FockVector, params: SystemParams, n_kicks: int,
           leak_tol: float = DEFAULT_LEAK_TOL) -> EvolveResult:
    """Apply F n_kicks times, recording the mean energy at every kick.

    A truncation leak beyond leak_tol flags the run unsafe; evolution
    continues and the flagged result is returned.
    """
    f = floquet(params, state.dim).matrix
    psi = state.amps.copy()
    energies = np.empty(n_kicks + 1)
    energies[0] = mean_energy(FockVector(psi))
    first_unsafe = None
    weights = np.arange(state.dim) + 0.5
    d = state.dim
    tail = d - d // 10
    for k in range(1, n_kicks + 1):
        psi = f @ psi
        energies[k] = float(np.sum(np.abs(psi) ** 2 * weights))
        if first_unsafe is None and float(np.sum(np.abs(psi[tail:]) ** 2)) > leak_tol:
            first_unsafe = k
    return EvolveResult(state=FockVector(psi), energies=energies,
                        truncation_unsafe=first_unsafe is not None,
                        first_unsafe_kick=first_unsafe)


def kicks_to_energy(params: SystemParams, e_target: float, n_max: int,
                    dim: int = 500, leak_tol: float = DEFAULT_LEAK_TOL) -> KicksToEnergyResult:
    """Smallest kick count at which the ground state's mean energy reaches
    e_target (units hbar*omega), or an exhausted result after n_max kicks."""
    f = floquet(params, dim).matrix
    psi = ground_state(dim).amps
    weights = np.arange(dim) + 0.5
    tail = dim - dim // 10
    energies = [0.5]
    first_unsafe = None
    hit = 0 if 0.5 >= e_target else None
    for k in range(1, n_max + 1):
        if hit is not None:
            break
        psi = f @ psi
        e = float(np.sum(np.abs(psi) ** 2 * weights))
        energies.append(e)
        if first_unsafe is None and float(np.sum(np.abs(psi[tail:]) ** 2)) > leak_tol:
            first_unsafe = k
        if e >= e_target:
            hit = k
    return KicksToEnergyResult(n_kicks=hit, reached=hit is not None,
                               energies=np.array(energies),
                               truncation_unsafe=first_unsafe is not None,
                               first_unsafe_kick=first_unsafe)


def energy_crossings(energies: np.ndarray, targets: list[float]) -> list[int | None]:
    """First kick index at which each target energy is reached."""
    out = []
    for t in targets:
        idx = np.nonzero(energies >= t)[0]
        out.append(int(idx[0]) if idx.size else None)
    return out


def q_function(state: FockVector, window: tuple[float, float, float, float],
               resolution: tuple[int, int]) -> QGrid:
    """Husimi distribution Q(alpha) = |<psi|alpha>|^2 / pi on a grid.

    The coherent overlaps are accumulated by the stable amplitude recurrence
    c_n = c_{n-1} * alpha / sqrt(n), one sweep over the basis per grid row.
    """
    re_min, re_max, im_min, im_max = window
    n_re, n_im = resolution
    re_axis = np.linspace(re_min, re_max, n_re)
    im_axis = np.linspace(im_min, im_max, n_im)
    conj_amps = state.amps.conj()
    values = np.empty((n_im, n_re))
    inv_sqrt = 1.0 / np.sqrt(np.arange(1, state.dim))
    for i, y in enumerate(im_axis):
        alpha = re_axis + 1j * y
        col = np.exp(-0.5 * np.abs(alpha) ** 2).astype(complex)
        overlap = conj_amps[0] * col
        for n in range(1, state.dim):
            col = col * alpha * inv_sqrt[n - 1]
            overlap += conj_amps[n] * col
        values[i] = np.abs(overlap) ** 2 / np.pi
    return QGrid(re_min, re_max, im_min, im_max, values)


def quasienergy_spectrum(params: SystemParams, dim: int,
                         discard_tol: float = EIGVAL_DISCARD_TOL) -> SpectrumResult:
    """Eigenphases of F with ground-state overlap weights.

    Eigenvalues off the unit circle by more than discard_tol (truncation
    artifacts) are dropped and counted.
    """
    f = floquet(params, dim).matrix
    try:
        lam, vecs = np.linalg.eig(f)
    except np.linalg.LinAlgError as exc:
        raise EigensolverError(
            f"eig failed at dim={dim}, params={params}; "
            f"max|F|={np.abs(f).max():.3e}, cond(F)~{np.linalg.cond(f):.3e}") from exc
    defects = np.abs(np.abs(lam) - 1.0)
    keep = defects < discard_tol
    order = np.argsort(np.angle(lam[keep]))
    phis = np.angle(lam[keep])[order]
    overlaps = np.abs(vecs[0, keep]) ** 2
    overlaps = overlaps[order]
    records = [QuasienergyRecord(float(p), float(o)) for p, o in zip(phis, overlaps)]
    return SpectrumResult(records=records, n_discarded=int(np.sum(~keep)),
                          params=params, dim=dim,
                          max_unit_defect=float(defects[keep].max()) if keep.any() else 0.0)


def band_max_gap(result: SpectrumResult, band: str = "uppermost") -> float:
    """Largest eigenphase gap inside one free-evolution band.

    Bands sit near the kappa = 0 phases -(n+1/2)*tau mod 2pi; states are
    assigned to the nearest band center within a quarter band spacing.
    """
    params = result.params
    centers = np.angle(np.exp(-1j * (np.arange(params.q) + 0.5) * params.tau))
    center = np.max(centers) if band == "uppermost" else float(band)
    phis = np.array([rec.phi for rec in result.records])
    dist = np.abs(np.angle(np.exp(1j * (phis - center))))
    sel = np.sort(phis[dist < params.tau / 4.0])
    if sel.size < 2:
        raise ValueError("fewer than two eigenphases in the requested band")
    return float(np.max(np.diff(sel)))


@dataclass
class DoublingResult:
    value: float
    dim: int
    converged: bool


def doubling_rule(observable, start: int = 256, max_dim: int = 2048,
                  rel_tol: float = 1e-6) -> DoublingResult:
    """Accept the observable at dimension D once recomputing at 2D moves it
    by less than rel_tol (relative); observable is a callable of D."""
    d = start
    val = observable(d)
    while 2 * d <= max_dim:
        val2 = observable(2 * d)
        if abs(val2 - val) <= rel_tol * max(1.0, abs(val)):
            return DoublingResult(value=val, dim=d, converged=True)
        d, val = 2 * d, val2
    return DoublingResult(value=val, dim=d, converged=False)
