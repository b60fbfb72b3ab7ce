"""Self-verification suite wiring the independent computation routes against
each other: Graf identities, the q-axis product rearrangement, the
displacement expansion of the kick, amplified-kick equivalence, the lattice
mapping against its closed forms, cross-representation fidelity, and the
phase-space symmetry commutators.

`run(level)` executes the quick (~tens of seconds) or full (~minutes) suite
and returns per-check results with measured values.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import fock, lattice, model, specfun

GOLDEN = model.GOLDEN_RATIO


@dataclass
class CheckResult:
    name: str
    passed: bool
    measured: float
    tol: float
    seconds: float
    note: str = ""

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        note = f"  [{self.note}]" if self.note else ""
        return (f"{status}  {self.name}: measured={self.measured:.3e} "
                f"tol={self.tol:.1e} ({self.seconds:.1f}s){note}")


def _check(name, measured, tol, t0, note="", larger_is_better=False):
    passed = measured >= tol if larger_is_better else measured <= tol
    return CheckResult(name=name, passed=passed, measured=float(measured),
                       tol=float(tol), seconds=time.time() - t0, note=note)


def check_resonant_table() -> CheckResult:
    t0 = time.time()
    expected = {
        1: (model.ResonanceKind.TRIVIAL_PERIOD, None),
        2: (model.ResonanceKind.TRIVIAL_PERIOD, None),
        3: (model.ResonanceKind.RESONANT, 2 * math.pi / math.sqrt(3)),
        4: (model.ResonanceKind.RESONANT, math.pi),
        5: (model.ResonanceKind.NO_RESONANCE_POSSIBLE, None),
        6: (model.ResonanceKind.RESONANT, 2 * math.pi / math.sqrt(3)),
        7: (model.ResonanceKind.NO_RESONANCE_POSSIBLE, None),
        8: (model.ResonanceKind.NO_RESONANCE_POSSIBLE, None),
    }
    worst = 0.0
    for q, (kind, principal) in expected.items():
        rc = model.resonant_values(q)
        if rc.kind is not kind:
            worst = 1.0
        elif principal is not None:
            worst = max(worst, abs(rc.principal - principal))
    return _check("resonant-value table q=1..8", worst, 1e-15, t0)


def check_graf_closure(n_triples: int = 100) -> CheckResult:
    t0 = time.time()
    rng = np.random.default_rng(20100317)
    worst = 0.0
    for _ in range(n_triples):
        n = int(rng.integers(-10, 11))
        zeta = float(rng.uniform(0.0, 5.0))
        alpha = float(rng.uniform(0.0, math.pi))
        geo = specfun.graf_geometry(zeta, alpha)
        lhs = specfun.graf_sum(n, zeta, alpha)
        rhs = specfun.bessel_j(n, geo.zeta_prime) * np.exp(1j * n * geo.chi)
        worst = max(worst, abs(lhs - rhs))
    # alpha = pi special case: J_n(2 zeta)
    for n in range(-6, 7):
        worst = max(worst, abs(specfun.graf_sum(n, 1.3, math.pi)
                               - specfun.bessel_j(n, 2.6)))
    return _check(f"Graf closure ({n_triples} random triples + alpha=pi)", worst, 1e-12, t0)


def check_axis_product(dim: int = 128) -> CheckResult:
    t0 = time.time()
    params = model.SystemParams(r=1, q=4, kappa=-0.8, eta_sq=math.pi)
    fq = fock.floquet_power(params, dim, params.q)
    prod = fock.kick_axis_product(params, dim)
    return _check(f"q-axis product vs F^q (D={dim}, full matrix)",
                  float(np.abs(fq - prod).max()), 1e-8, t0)


def check_kick_expansion(dim: int = 256) -> CheckResult:
    t0 = time.time()
    params = model.SystemParams(r=1, q=4, kappa=-0.8, eta_sq=math.pi)
    spectral = fock.build_kick(params, dim)
    expansion = fock.kick_expansion_matrix(params, dim)
    block = fock.interior_block(dim)
    return _check(f"kick spectral vs displacement expansion (D={dim}, block={block})",
                  fock.interior_max(spectral - expansion, block), 1e-8, t0)


def check_mapping_vs_analytic(n_max: int = 5, span: int = 8) -> CheckResult:
    t0 = time.time()
    params = model.SystemParams(r=1, q=4, kappa=-0.8, eta_sq=math.pi)
    state = lattice.steps(lattice.from_params(0.0, params), 2)
    worst = 0.0
    for n_kicks in range(2, n_max + 1):
        for m in range(-span, span + 1):
            for n in range(-span, span + 1):
                got = state.coeffs.get((m, n), 0.0)
                worst = max(worst, abs(got - lattice.analytic_q4(n_kicks, params.zeta, m, n)))
        if n_kicks < n_max:
            state = lattice.step(state)
    return _check(f"lattice mapping vs closed form (q=4, N=2..{n_max})", worst, 1e-10, t0)


def check_q6_cycle() -> CheckResult:
    t0 = time.time()
    params = model.SystemParams(r=1, q=6, kappa=-0.8, eta_sq=2 * math.pi / math.sqrt(3))
    kick3 = lattice.steps(lattice.from_params(0.0, params), 3)
    stepped = lattice.steps(kick3, 3)
    jumped = lattice.analytic_q6_cycle(kick3)
    keys = set(stepped.coeffs) | set(jumped.coeffs)
    worst = max(abs(stepped.coeffs.get(k, 0.0) - jumped.coeffs.get(k, 0.0)) for k in keys)
    return _check("q=6 three-step cycle vs stepped mapping", worst, 1e-10, t0)


def check_phase_pattern() -> CheckResult:
    t0 = time.time()
    params = model.SystemParams(r=1, q=4, kappa=-0.8, eta_sq=math.pi)
    worst = 0.0
    state = lattice.steps(lattice.from_params(0.0, params), 2)
    for n_kicks in range(2, 7):
        cm, cn = lattice.bessel_growth_factors(n_kicks)
        for (m, n), val in state.coeffs.items():
            den = (specfun.bessel_j(m, cm * params.zeta)
                   * specfun.bessel_j(n, cn * params.zeta))
            pattern = lattice.phase_pattern(n_kicks, m, n)
            # pattern * den == coefficient for every retained entry; the raw
            # quotient form is ill-conditioned near Bessel zeros
            worst = max(worst, abs(val - pattern * den))
        state = lattice.step(state)
    return _check("resonant phase pattern (-1)^{mn} i^{m+n}", worst, 1e-10, t0)


def cross_representation_fidelity(params: model.SystemParams, n_kicks: int,
                                  dim: int, zeta_skew: float = 0.0) -> float:
    """Fidelity between Fock-propagated and lattice-propagated states.

    zeta_skew perturbs the lattice side only; nonzero skew is a sensitivity
    hook used to confirm the check can fail.
    """
    ev = fock.evolve(fock.ground_state(dim), params, n_kicks)
    ls = lattice.init_coherent(0.0, params.q, params.eta,
                               params.zeta * (1.0 + zeta_skew))
    ls = lattice.steps(ls, n_kicks)
    conv = lattice.to_fock(ls, dim)
    return fock.fidelity(ev.state, conv.state)


def check_cross_representation(n_kicks: int, etas: str = "both",
                               qs=(3, 4, 6)) -> list[CheckResult]:
    out = []
    for q in qs:
        principal = model.principal_value(q)
        eta2s = [("principal", principal)]
        if etas == "both":
            eta2s.append(("phi*pi", GOLDEN * math.pi))
        for tag, eta_sq in eta2s:
            t0 = time.time()
            params = model.SystemParams(r=1, q=q, kappa=-0.8, eta_sq=eta_sq)
            res = fock.doubling_rule(
                lambda d: cross_representation_fidelity(params, n_kicks, d),
                start=256)
            out.append(_check(
                f"fock/lattice fidelity q={q} eta2={tag} N={n_kicks} (D={res.dim})",
                res.value, 0.999, t0, larger_is_better=True,
                note="" if res.converged else "doubling rule not converged"))
    return out


def check_amplified(cases=((4, 2), (4, 3), (3, 2)), dim: int = 256) -> list[CheckResult]:
    out = []
    for q, v in cases:
        t0 = time.time()
        params = model.SystemParams(r=1, q=q, kappa=-0.8,
                                    eta_sq=model.principal_value(q))
        fqv = fock.floquet_power(params, dim, q * v)
        amp = fock.amplified_kick_operator(params, dim, v)
        block = fock.interior_block(dim)
        out.append(_check(
            f"amplified kick q={q} v={v} vs F^(qv) (D={dim}, block={block})",
            fock.mismatch_up_to_phase(amp, fqv, block), 1e-7, t0))
    return out


def check_commutators(dim: int = 512) -> list[CheckResult]:
    out = []
    for q in (3, 4, 6):
        for tag, eta_sq in (("principal", model.principal_value(q)),
                            ("phi*pi", GOLDEN * math.pi)):
            t0 = time.time()
            params = model.SystemParams(r=1, q=q, kappa=-0.8, eta_sq=eta_sq)
            gens = model.symmetry_generators(q, params.eta, "gamma").generators
            worst = max(fock.symmetry_commutator_norm(params, dim, g) for g in gens)
            out.append(_check(
                f"[F^q, D(gamma)] q={q} eta2={tag} (D={dim})", worst, 1e-6, t0))
    return out


def check_state_roundtrip() -> CheckResult:
    t0 = time.time()
    params = model.SystemParams(r=1, q=4, kappa=-0.8, eta_sq=GOLDEN * math.pi)
    state = lattice.steps(lattice.from_params(0.25 + 0.1j, params), 3)
    back = lattice.from_json(lattice.to_json(state))
    worst = 0.0 if back == state else max(
        abs(state.coeffs.get(k, 0) - back.coeffs.get(k, 0))
        for k in set(state.coeffs) | set(back.coeffs))
    return _check("lattice state JSON roundtrip", worst, 0.0, t0)


def run(level: str = "quick", zeta_skew: float = 0.0) -> list[CheckResult]:
    """Run the verification suite; `level` is 'quick' or 'full'."""
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    checks = [
        check_resonant_table(),
        check_graf_closure(),
        check_axis_product(),
        check_kick_expansion(),
        check_mapping_vs_analytic(),
        check_phase_pattern(),
        check_state_roundtrip(),
        check_q6_cycle(),
    ]
    if level == "quick":
        t0 = time.time()
        params = model.SystemParams(r=1, q=4, kappa=-0.8, eta_sq=math.pi)
        fid = cross_representation_fidelity(params, 12, 512, zeta_skew=zeta_skew)
        checks.append(_check("fock/lattice fidelity q=4 N=12 (D=512)", fid, 0.999,
                             t0, larger_is_better=True))
        checks.extend(check_amplified(cases=((4, 2),), dim=128))
        checks.extend(check_commutators(dim=256))
    else:
        checks.extend(check_cross_representation(n_kicks=12))
        if zeta_skew:
            t0 = time.time()
            params = model.SystemParams(r=1, q=4, kappa=-0.8, eta_sq=math.pi)
            fid = cross_representation_fidelity(params, 12, 512, zeta_skew=zeta_skew)
            checks.append(_check("fock/lattice fidelity q=4 N=12 (D=512, skewed)",
                                 fid, 0.999, t0, larger_is_better=True))
        checks.extend(check_amplified())
        checks.extend(check_commutators())
    return checks
