"""Physical and dimensionless parameters, phase-space symmetry sets, and
quantum-resonance classification for the kicked harmonic oscillator.

Planck's constant appears only in `reduce`; everything downstream of the
dimensionless description is hbar-free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from scipy.constants import hbar as HBAR

GOLDEN_RATIO = (1.0 + math.sqrt(5.0)) / 2.0

#: q values whose kick axes form a crystal lattice in phase space
CRYSTAL_Q = (3, 4, 6)

DEFAULT_RATIONAL_TOL = 1e-9
Q_MAX_PERIOD = 64
B_MAX_RESONANCE = 64


class NoRationalPeriodError(ValueError):
    """omega*T is not within tolerance of 2*pi*r/q for any q <= Q_MAX_PERIOD."""


class NoCrystalSymmetryError(ValueError):
    """Raised for q outside {3, 4, 6} where no lattice symmetry set exists."""


class NonresonantError(ValueError):
    """An operation requiring a quantum-resonant eta^2 got a nonresonant one."""


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory description of the atom-optical kicked oscillator.

    mass [kg], trap_frequency [rad/s], wavevector [1/m] (two photon recoils:
    K = 4*pi/lambda_L), rabi_frequency [rad/s], pulse_duration [s],
    detuning [rad/s], kick_period [s].
    """

    mass: float
    trap_frequency: float
    wavevector: float
    rabi_frequency: float
    pulse_duration: float
    detuning: float
    kick_period: float

    def __post_init__(self):
        for name in ("mass", "trap_frequency", "wavevector", "pulse_duration", "kick_period"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.detuning == 0:
            raise ValueError("detuning must be nonzero")


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless dynamical description (r, q, kappa, eta^2).

    tau and zeta are always derived from the primaries, so they satisfy
    tau = 2*pi*r/q and zeta = -kappa/(sqrt(2)*eta^2) exactly.
    """

    r: int
    q: int
    kappa: float
    eta_sq: float

    def __post_init__(self):
        if self.r < 1 or self.q < 1:
            raise ValueError("r and q must be positive integers")
        if math.gcd(self.r, self.q) != 1:
            raise ValueError(f"r={self.r}, q={self.q} must be coprime")
        if self.eta_sq <= 0:
            raise ValueError("eta_sq must be positive")

    @property
    def tau(self) -> float:
        return 2.0 * math.pi * self.r / self.q

    @property
    def eta(self) -> float:
        return math.sqrt(self.eta_sq)

    @property
    def zeta(self) -> float:
        return -self.kappa / (math.sqrt(2.0) * self.eta_sq)


class ResonanceKind(str, Enum):
    RESONANT = "resonant"
    NONRESONANT = "nonresonant"
    TRIVIAL_PERIOD = "trivial_period"
    NO_RESONANCE_POSSIBLE = "no_resonance_possible"


@dataclass(frozen=True)
class ResonanceClass:
    """Outcome of resonance classification.

    For RESONANT, eta^2 = (a/b) * principal within tolerance.  TRIVIAL_PERIOD
    marks q in {1, 2}, where the free evolution is inert for every eta^2 and
    no quantum resonance exists.
    """

    kind: ResonanceKind
    a: int | None = None
    b: int | None = None
    principal: float | None = None

    def as_dict(self) -> dict:
        return {"kind": self.kind.value, "a": self.a, "b": self.b, "principal": self.principal}


@dataclass(frozen=True)
class SymmetryLattice:
    """Two generating displacements of a phase-space symmetry set."""

    q: int
    generators: tuple[complex, complex]


def reduce(p: PhysicalParams, r: int | None = None, q: int | None = None,
           tol: float = DEFAULT_RATIONAL_TOL) -> SystemParams:
    """Map laboratory parameters to the dimensionless (r, q, kappa, eta^2).

    kappa = hbar*Omega^2*t_p*K^2 / (8*sqrt(2)*Delta*M*omega),
    eta^2 = K^2*hbar / (2*M*omega), tau = omega*T.  The kick period must
    rationally divide the oscillator period: tau = 2*pi*r/q.  Supply (r, q)
    explicitly or let the smallest q <= Q_MAX_PERIOD within `tol` be found.
    """
    omega = p.trap_frequency
    tau = omega * p.kick_period
    kappa = (HBAR * p.rabi_frequency ** 2 * p.pulse_duration * p.wavevector ** 2
             / (8.0 * math.sqrt(2.0) * p.detuning * p.mass * omega))
    eta_sq = p.wavevector ** 2 * HBAR / (2.0 * p.mass * omega)
    if (r is None) != (q is None):
        raise ValueError("supply both r and q, or neither")
    if r is None:
        r, q = _rational_period(tau, tol)
    elif abs(tau - 2.0 * math.pi * r / q) > tol:
        raise NoRationalPeriodError(
            f"omega*T = {tau} is not within {tol} of 2*pi*{r}/{q}")
    return SystemParams(r=r, q=q, kappa=kappa, eta_sq=eta_sq)


def _rational_period(tau: float, tol: float) -> tuple[int, int]:
    for q in range(1, Q_MAX_PERIOD + 1):
        r = round(tau * q / (2.0 * math.pi))
        if r < 1 or math.gcd(r, q) != 1:
            continue
        if abs(tau - 2.0 * math.pi * r / q) <= tol:
            return r, q
    raise NoRationalPeriodError(
        f"omega*T = {tau} has no rational decomposition 2*pi*r/q with q <= {Q_MAX_PERIOD}")


def z_values(q: int) -> list[float]:
    """Distinct nonzero values of |sin(2*pi*j/q)|, j = 0..q-1.

    Quantum resonances require all of these to coincide, which happens only
    for q in {3, 4, 6}.
    """
    vals: list[float] = []
    for j in range(q):
        z = abs(math.sin(2.0 * math.pi * j / q))
        if z > 1e-12 and not any(abs(z - v) < 1e-12 for v in vals):
            vals.append(z)
    return sorted(vals)


def principal_value(q: int) -> float | None:
    """Principal quantum-resonance value of eta^2 for the given q, if any."""
    if q == 4:
        return math.pi
    if q in (3, 6):
        return 2.0 * math.pi / math.sqrt(3.0)
    return None


def resonant_values(q: int) -> ResonanceClass:
    """Resonance metadata for a kick count q: the principal eta^2, trivial
    period, or impossibility."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    if q in (1, 2):
        return ResonanceClass(kind=ResonanceKind.TRIVIAL_PERIOD)
    p = principal_value(q)
    if p is None:
        return ResonanceClass(kind=ResonanceKind.NO_RESONANCE_POSSIBLE)
    return ResonanceClass(kind=ResonanceKind.RESONANT, principal=p)


def commutation_phase(eta_sq: float, q: int, r: int, k_m: int, k_n: int, dj: int) -> complex:
    """Phase e^{alpha beta* - alpha* beta} between two kick displacements
    separated by dj axes; equals 1 exactly when they commute."""
    if not 0 <= dj <= q - 1:
        raise ValueError("dj must lie in 0..q-1")
    arg = 2.0 * eta_sq * k_m * k_n * math.sin(2.0 * math.pi * r * dj / q)
    return complex(math.cos(arg), -math.sin(arg))


def classify(eta_sq: float, q: int, tol: float = DEFAULT_RATIONAL_TOL,
             b_max: int = B_MAX_RESONANCE) -> ResonanceClass:
    """Classify eta^2 as a rational multiple a/b of the principal resonance
    value (continued-fraction detection) or as nonresonant."""
    if eta_sq <= 0:
        raise ValueError("eta_sq must be positive")
    base = resonant_values(q)
    if base.kind is not ResonanceKind.RESONANT:
        return base
    ratio = eta_sq / base.principal
    frac = Fraction(ratio).limit_denominator(b_max)
    if frac.numerator >= 1 and abs(ratio - float(frac)) < tol:
        return ResonanceClass(kind=ResonanceKind.RESONANT, a=frac.numerator,
                              b=frac.denominator, principal=base.principal)
    return ResonanceClass(kind=ResonanceKind.NONRESONANT, principal=base.principal)


def symmetry_generators(q: int, eta: float, which: str = "gamma") -> SymmetryLattice:
    """Generating displacements of the symmetry set:

    'gamma' - translations commuting with F^q for every eta (the classical
    stochastic-web crystal group); 'Gamma' - displacements out of which F^q
    itself is built.  The two coincide exactly at the principal resonance.
    """
    if q not in CRYSTAL_Q:
        raise NoCrystalSymmetryError(f"no crystal symmetry for q={q}; need q in {CRYSTAL_Q}")
    if which == "gamma":
        if q == 4:
            gens = (math.pi / eta + 0j, 1j * math.pi / eta)
        else:
            gens = ((1.0 + 1j / math.sqrt(3.0)) * math.pi / eta,
                    (1.0 - 1j / math.sqrt(3.0)) * math.pi / eta)
    elif which == "Gamma":
        if q == 4:
            gens = (eta + 0j, 1j * eta)
        else:
            gens = ((math.sqrt(3.0) + 1j) / 2.0 * eta,
                    (math.sqrt(3.0) - 1j) / 2.0 * eta)
    else:
        raise ValueError("which must be 'gamma' or 'Gamma'")
    return SymmetryLattice(q=q, generators=gens)


def parse_eta2(text: str) -> float:
    """Parse a symbolic eta^2: float literal or products/quotients of
    numbers, `pi`, `phi` (golden ratio) and `sqrt3`, e.g. `pi/2`,
    `2pi/sqrt3`, `phi*pi`, `3/2*pi`, `sqrt3*pi/2`."""
    import re

    s = text.strip().lower().replace(" ", "")
    if not s:
        raise ValueError("empty eta^2 expression")
    s = re.sub(r"(\d)(pi|phi|sqrt3)", r"\1*\2", s)
    tokens = re.split(r"([*/])", s)
    consts = {"pi": math.pi, "phi": GOLDEN_RATIO, "sqrt3": math.sqrt(3.0)}

    def atom(tok: str) -> float:
        if tok in consts:
            return consts[tok]
        try:
            return float(tok)
        except ValueError:
            raise ValueError(f"cannot parse eta^2 token {tok!r} in {text!r}") from None

    value = atom(tokens[0])
    for op, tok in zip(tokens[1::2], tokens[2::2]):
        value = value * atom(tok) if op == "*" else value / atom(tok)
    return value
