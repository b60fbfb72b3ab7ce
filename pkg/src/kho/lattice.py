"""Phase-space lattice-state representation of kicked-oscillator dynamics.

A state after j kicks is a superposition of coherent states on the oblique
grid i*eta*(m + n*e^{-i 2 pi/q}) around a rotating center, with complex
coefficients M[j]_{m,n}.  One kick acts as an exact recurrence on the
coefficients:

    M[j+1]_{m,n} = sum_k i^k J_k(zeta) M[j]_{m*xi_q + n - k, -m}
                   * exp(-i k m eta^2 sin(2 pi / q))

which this module implements in scatter form: the entry at (m0, n0)
contributes to (-n0, m0 + xi_q*n0 + k) with weight i^k J_k(zeta)
e^{+i k n0 eta^2 sin(2 pi/q)} -- the same substitution m' = -n,
n' = m + n*xi_q + k read in the opposite direction.

The derivation fixes r = 1; `step` refuses anything else.  At quantum
resonance the phase factors collapse to signs and the evolution reduces to
cyclically growing Bessel arguments (analytic_q4 for q = 4; a three-step
cycle evaluated by analytic_q6_cycle for q = 6).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .fock import FockVector
from .model import NonresonantError, SystemParams

#: integer xi_q from decomposing e^{-i 4 pi/q} over {1, e^{-i 2 pi/q}}
XI_Q = {3: -1, 4: 0, 6: 1}

EPS_LAT = 1e-12  # magnitude threshold for retaining coefficients


@dataclass
class LatticeState:
    alpha: complex  # coherent amplitude at the lattice center
    j: int  # kicks applied so far
    q: int
    eta: float
    zeta: float
    coeffs: dict[tuple[int, int], complex] = field(default_factory=dict)

    @property
    def eta_sq(self) -> float:
        return self.eta * self.eta


@dataclass
class ConversionResult:
    state: FockVector
    raw_norm: float  # pre-normalization norm; |raw_norm - 1| measures truncation
    reliable: bool


def init_coherent(alpha: complex, q: int, eta: float, zeta: float) -> LatticeState:
    """Lattice state for a bare coherent state |alpha>: M[0] = delta_m0 delta_n0."""
    if q not in XI_Q:
        raise ValueError(f"lattice evolution needs q in {sorted(XI_Q)}, got q={q}")
    if eta <= 0:
        raise ValueError("eta must be positive")
    return LatticeState(alpha=complex(alpha), j=0, q=q, eta=eta, zeta=zeta,
                        coeffs={(0, 0): 1.0 + 0.0j})


def from_params(alpha: complex, params: SystemParams) -> LatticeState:
    if params.r != 1:
        raise ValueError("the lattice mapping is derived for r = 1 only")
    return init_coherent(alpha, params.q, params.eta, params.zeta)


def step(state: LatticeState, eps: float = EPS_LAT) -> LatticeState:
    """Advance the coefficient lattice by one kick.

    The k-sum truncates at k_cutoff(zeta); coefficients below eps are
    dropped after the full accumulation.
    """
    xi = XI_Q[state.q]
    kc = specfun.k_cutoff(state.zeta)
    ks = range(-kc, kc + 1)
    jk = specfun.bessel_range(state.zeta, -kc, kc)
    # i^k J_k(zeta), k = -kc..kc
    wk = [(1j) ** k * jk[k + kc] for k in ks]
    w = state.eta_sq * math.sin(2.0 * math.pi / state.q)
    new: dict[tuple[int, int], complex] = {}
    for (m0, n0), val in state.coeffs.items():
        # e^{i k n0 w} across the k range
        rot = complex(math.cos(n0 * w), math.sin(n0 * w))
        phase = rot ** (-kc)
        m_new = -n0
        n_base = m0 + xi * n0
        for k in ks:
            key = (m_new, n_base + k)
            contrib = val * wk[k + kc] * phase
            acc = new.get(key)
            new[key] = contrib if acc is None else acc + contrib
            phase *= rot
    new = {key: v for key, v in new.items() if abs(v) >= eps}
    return LatticeState(alpha=state.alpha, j=state.j + 1, q=state.q,
                        eta=state.eta, zeta=state.zeta, coeffs=new)


def steps(state: LatticeState, n: int, eps: float = EPS_LAT) -> LatticeState:
    for _ in range(n):
        state = step(state, eps)
    return state


def bessel_growth_factors(n_kicks: int) -> tuple[int, int]:
    """Integer factors (C_m, C_n) scaling the Bessel arguments after N kicks
    of the resonant q = 4 evolution, N >= 2.

    Two-kick cycle (C_m, C_n) -> (C_n, C_m + 1): every second kick merges the
    mapping's J_k(zeta) into one coordinate through the addition theorem
    sum_k J_k(x) J_{n-k}(y) = J_n(x+y), so the arguments grow linearly --
    the closed-form counterpart of the kick strength amplifying linearly
    over full periods.
    """
    if n_kicks % 2 == 0:
        half = n_kicks // 2
        return half, half
    return (n_kicks - 1) // 2, (n_kicks + 1) // 2


def analytic_q4(n_kicks: int, zeta: float, m: int, n: int) -> complex:
    """Closed-form coefficient M[N]_{m,n} for q = 4 at the principal
    quantum resonance (eta^2 an odd multiple of pi):

        (-1)^{m n} i^m J_m(C_m zeta) i^n J_n(C_n zeta),  N >= 2,

    with (C_m, C_n) = bessel_growth_factors(N).  The whole time dependence
    sits in the growing Bessel arguments.
    """
    if n_kicks < 2:
        raise ValueError(f"closed form holds for N >= 2 kicks, got N={n_kicks}")
    cm, cn = bessel_growth_factors(n_kicks)
    sign = -1.0 if (m * n) % 2 else 1.0
    return (sign * (1j) ** m * specfun.bessel_j(m, cm * zeta)
            * (1j) ** n * specfun.bessel_j(n, cn * zeta))


def phase_pattern(n_kicks: int, m: int, n: int) -> complex:
    """Coefficient phase with Bessel parity divided out, q = 4 resonant case:
    M[N]_{m,n} / [J_m(C_m zeta) J_n(C_n zeta)] = (-1)^{m n} i^{m+n},
    independent of N for N >= 2."""
    if n_kicks < 2:
        raise ValueError(f"pattern holds for N >= 2 kicks, got N={n_kicks}")
    sign = -1.0 if (m * n) % 2 else 1.0
    return sign * (1j) ** ((m + n) % 4)


def _q6_parity_check(state: LatticeState) -> int:
    """Resonance check for the q = 6 cycle; returns the multiple w with
    eta^2 = w * 2 pi / sqrt(3), requiring w odd (the sign structure
    (-1)^{...} of the cycle assumes e^{-i k m eta^2 sin(2pi/6)} = (-1)^{k m})."""
    w = state.eta_sq * math.sqrt(3.0) / (2.0 * math.pi)
    w_int = round(w)
    if abs(w - w_int) > 1e-9 or w_int < 1:
        raise NonresonantError(
            f"eta_sq={state.eta_sq} is not a multiple of 2*pi/sqrt(3)")
    if w_int % 2 == 0:
        raise NonresonantError(
            "the q=6 doubling cycle is implemented for odd multiples of 2*pi/sqrt(3)")
    return w_int


def q6_triple_sum(zeta_eff: float, m: int, n: int) -> complex:
    """Coefficient of the resonant q = 6 evolution at a cycle point as the
    triple Bessel sum

        sum_k i^k J_k i^{n-k} J_{n-k} i^{m+n-k} J_{m+n-k} (-1)^{m n + n^2 + k^2},

    all arguments zeta_eff.  The coefficients cannot be reduced below a
    single sum over three Bessel factors; the three-kick cycle advances
    zeta_eff by one unit of zeta each time.
    """
    kc = specfun.k_cutoff(zeta_eff)
    total = 0.0 + 0.0j
    for k in range(-kc, kc + 1):
        jk = specfun.bessel_j(k, zeta_eff)
        if jk == 0.0:
            continue
        j1 = specfun.bessel_j(n - k, zeta_eff)
        j2 = specfun.bessel_j(m + n - k, zeta_eff)
        power = (1j) ** ((k + (n - k) + (m + n - k)) % 4)
        sign = -1.0 if (m * n + n * n + k * k) % 2 else 1.0
        total += sign * power * jk * j1 * j2
    return total


def analytic_q6_cycle(state: LatticeState, eps: float = EPS_LAT) -> LatticeState:
    """Jump a resonant q = 6 state from kick 3j to kick 3(j+1).

    The coefficients at 3(j+1) are the kick-3 triple sums with every Bessel
    argument scaled to (j+1) * zeta: each cycle folds one more mapping
    J(zeta) into the state arguments via the addition theorem, mirroring the
    q = 4 linear growth.
    """
    if state.q != 6:
        raise ValueError("the three-step cycle applies to q = 6")
    if state.j % 3 != 0:
        raise ValueError(f"state must sit on the cycle (j divisible by 3), got j={state.j}")
    _q6_parity_check(state)
    cycles = state.j // 3
    zeff = state.zeta * (cycles + 1)
    kc = specfun.k_cutoff(zeff)
    coeffs: dict[tuple[int, int], complex] = {}
    for m in range(-3 * kc, 3 * kc + 1):
        for n in range(-2 * kc, 2 * kc + 1):
            val = q6_triple_sum(zeff, m, n)
            if abs(val) >= eps:
                coeffs[(m, n)] = val
    return LatticeState(alpha=state.alpha, j=state.j + 3, q=state.q,
                        eta=state.eta, zeta=state.zeta, coeffs=coeffs)


def to_fock(state: LatticeState, dim: int,
            unreliable_tol: float = 1e-3) -> ConversionResult:
    """Materialize the lattice superposition in the truncated number basis.

    Each term is a displaced coherent state, reduced with
    D(beta)|alpha_j> = e^{(beta alpha_j^* - beta^* alpha_j)/2} |beta + alpha_j>,
    and the |gamma> expansions are accumulated by the amplitude recurrence.
    The output is normalized; raw_norm records the pre-normalization norm.
    """
    if not state.coeffs:
        raise ValueError("empty coefficient map")
    q = state.q
    omega = np.exp(-2j * np.pi / q)
    alpha_j = state.alpha * omega ** state.j
    global_phase = np.exp(-1j * np.pi * state.j / q)
    items = sorted(state.coeffs.items())
    ms = np.array([k[0] for k, _ in items])
    ns = np.array([k[1] for k, _ in items])
    vals = np.array([v for _, v in items])
    betas = 1j * state.eta * (ms + ns * omega)
    pref = vals * np.exp((betas * np.conj(alpha_j) - np.conj(betas) * alpha_j) / 2.0)
    pref *= global_phase
    gammas = betas + alpha_j
    # psi_n = sum_i pref_i c_n(gamma_i), via one recurrence sweep
    psi = np.empty(dim, dtype=complex)
    col = np.exp(-0.5 * np.abs(gammas) ** 2).astype(complex)
    psi[0] = pref @ col
    for n in range(1, dim):
        col *= gammas / math.sqrt(n)
        psi[n] = pref @ col
    raw_norm = float(np.linalg.norm(psi))
    reliable = abs(raw_norm - 1.0) <= unreliable_tol
    return ConversionResult(state=FockVector(psi / raw_norm),
                            raw_norm=raw_norm, reliable=reliable)


def support_radius(state: LatticeState) -> int:
    """Largest |m| or |n| carrying a retained coefficient."""
    return max(max(abs(m), abs(n)) for m, n in state.coeffs)


# ---------------------------------------------------------------------------
# serialization


def to_json(state: LatticeState) -> str:
    payload = {
        "alpha_re": state.alpha.real,
        "alpha_im": state.alpha.imag,
        "j": state.j,
        "q": state.q,
        "eta": state.eta,
        "zeta": state.zeta,
        "coeffs": [[m, n, v.real, v.imag] for (m, n), v in sorted(state.coeffs.items())],
    }
    return json.dumps(payload)


def from_json(text: str) -> LatticeState:
    d = json.loads(text)
    coeffs = {(int(m), int(n)): complex(re, im) for m, n, re, im in d["coeffs"]}
    return LatticeState(alpha=complex(d["alpha_re"], d["alpha_im"]), j=int(d["j"]),
                        q=int(d["q"]), eta=float(d["eta"]), zeta=float(d["zeta"]),
                        coeffs=coeffs)


def save_state(state: LatticeState, path) -> None:
    with open(path, "w") as fh:
        fh.write(to_json(state))


def load_state(path) -> LatticeState:
    with open(path) as fh:
        return from_json(fh.read())
