"""Grid-based verification suite behind the ``verify`` CLI command.

Runs every identity, conjugacy, residual, and trajectory check on the default
parameter grid and aggregates one pass/fail record per check name.  Cells that
violate the preconditions of the maps (critical exponent, non-positive target
dimension) are skipped and reported, not failed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import solutions
from .equivalence import (
    Branch,
    coefficient_deviation,
    ple_preimage_dimensions,
    ple_to_pme,
    pme_branch_dimensions,
    pme_to_ple,
    verify_equivalence,
)
from .errors import UnphysicalDimensionError
from .integrator import IntegrationSettings, compare_trajectories, integrate
from .params import PLEParams, PMEParams, SimilarityType, critical_exponents, unified_coefficients
from .phase_plane import (
    line_betas_ple,
    line_betas_pme,
    line_condition_value,
    ple_native_system_xy,
    ple_trajectory_to_unified,
    pme_native_system,
    pme_trajectory_to_unified,
    profile_to_state,
    straight_line,
    unified_rhs,
    unified_system,
    yamabe_curve,
)

GRID_M = (-1.0 / 3.0, 0.2, 0.25, 0.5, 2.0, 3.0)
GRID_N = (1.0, 3.0, 4.0, 5.0)

CONJUGACY_POINTS_PME = {
    (2.0, 1.0): ((0.0, 0.5), (0.3, 0.2), (0.6, 0.4), (0.2, 0.8), (0.5, 0.1)),
    (0.25, 3.0): ((0.0, 0.3), (-0.5, 0.2), (0.4, 0.1), (-1.0, 0.4), (0.2, 0.25)),
}
CONJUGACY_POINTS_PLE = {
    (3.0, 1.0): ((0.1, 0.5), (0.2, 0.3), (0.05, 1.0), (0.3, -0.2), (0.15, 0.8)),
    (1.25, 2.5): ((0.5, -0.5), (0.3, -0.2), (0.2, 0.1), (0.4, -0.8), (0.6, -0.3)),
}


@dataclass
class CheckResult:
    name: str
    passed: bool
    max_dev: float
    tol: float

    def as_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "max_dev": self.max_dev, "tol": self.tol}


@dataclass
class _Agg:
    """Running worst-deviation aggregator for one named check."""

    tol: float
    max_dev: float = 0.0
    failures: int = 0
    samples: int = 0

    def add(self, dev: float) -> None:
        self.samples += 1
        self.max_dev = max(self.max_dev, abs(dev))
        if abs(dev) > self.tol:
            self.failures += 1

    def result(self, name: str) -> CheckResult:
        return CheckResult(name, self.failures == 0 and self.samples > 0, self.max_dev, self.tol)


@dataclass
class GridReport:
    checks: list[CheckResult] = field(default_factory=list)
    skipped: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "status": "ok" if self.passed else "fail",
            "checks": [c.as_dict() for c in self.checks],
            "params": {
                "grid_m": list(GRID_M),
                "grid_n": list(GRID_N),
                "beta_set": "0, beta1, beta2, 1",
                "skipped": self.skipped,
            },
        }


def default_grid_cells(skipped: list[dict] | None = None):
    """Yield valid (m, n, beta) cells; record precondition skips."""
    for m in GRID_M:
        for n in GRID_N:
            crit = critical_exponents(n)
            if abs(m - crit.m_c) <= 1e-9 * max(1.0, abs(crit.m_c)):
                if skipped is not None:
                    skipped.append({"m": m, "n": n, "reason": "m = m_c (critical)"})
                continue
            b1, b2 = line_betas_pme(m, n)
            betas = [0.0, 1.0]
            for b in (b1, b2):
                if b is not None and all(abs(b - x) > 1e-15 for x in betas):
                    betas.append(b)
            for beta in betas:
                yield m, n, beta


def _branch_images(params: PMEParams, skipped: list[dict] | None):
    for branch in (Branch.BRANCH1, Branch.BRANCH2):
        try:
            yield branch, pme_to_ple(params, branch)
        except UnphysicalDimensionError as exc:
            if skipped is not None:
                skipped.append(
                    {"m": params.m, "n": params.n, "branch": branch.name, "reason": str(exc)}
                )


def check_identity_grid(tol_coeff: float = 1e-10, tol_identity: float = 1e-12) -> GridReport:
    """Coefficient identification, algebraic identities, and round trips."""
    report = GridReport()
    coeff = _Agg(tol_coeff)
    beta_id = _Agg(tol_identity)
    b_ratio = _Agg(tol_identity)
    sign_id = _Agg(tol_identity)
    sum_np = _Agg(tol_identity)
    sum_n = _Agg(tol_identity)
    roundtrip = _Agg(1e-10)
    line_cond = _Agg(1e-10)

    for m, n, beta in default_grid_cells(report.skipped):
        pme = PMEParams(m, n, beta)
        ca = unified_coefficients(pme)
        np1, np2 = pme_branch_dimensions(m, n)
        sum_np.add(1.0 / np1 + 1.0 / np2 - (1.0 - m) / (m + 1.0))
        for branch, ple in _branch_images(pme, report.skipped):
            cb = unified_coefficients(ple)
            dev, _ = coefficient_deviation(ca, cb)
            coeff.add(dev)
            coeff.add(0.0 if ca.const_term == cb.const_term else 1.0)
            coeff.add(0.0 if ca.psi_coeff == cb.psi_coeff else 1.0)

            lhs = (beta * (n - 2.0)) ** 2
            rhs = (ple.beta * ple.n) ** 2
            beta_id.add((lhs - rhs) / max(1.0, abs(lhs)))
            b_ratio.add(cb.b / ca.b - (ple.n / (n - 2.0)) ** 2)
            sign_id.add(0.0 if ca.const_term == cb.const_term else 1.0)

            n1, n2 = ple_preimage_dimensions(ple.p, ple.n)
            sum_n.add(1.0 / (n1 - 2.0) + 1.0 / (n2 - 2.0) - (1.0 - m) / (2.0 * m))

            back = ple_to_pme(ple, branch)
            roundtrip.add(abs(back.m - m) / max(1.0, abs(m)))
            roundtrip.add(abs(back.n - n) / max(1.0, abs(n)))
            roundtrip.add(abs(back.beta - beta) / max(1.0, abs(beta)))

        # Straight-line condition for the two line betas (needs sgn(b) = +1, Type I).
        if ca.const_term == 1:
            for lb in line_betas_pme(m, n):
                if lb is None:
                    continue
                line_cond.add(line_condition_value(unified_coefficients(PMEParams(m, n, lb))))
            for branch, ple in _branch_images(PMEParams(m, n, 0.0), None):
                for lb in line_betas_ple(ple.p, ple.n):
                    if lb is None:
                        continue
                    cc = unified_coefficients(type(ple)(ple.p, ple.n, lb))
                    line_cond.add(line_condition_value(cc))

    report.checks.extend(
        [
            coeff.result("coefficient_match"),
            beta_id.result("beta_identity"),
            b_ratio.result("b_ratio_identity"),
            sign_id.result("sign_match"),
            sum_np.result("branch_sum_ple"),
            sum_n.result("branch_sum_pme"),
            roundtrip.result("roundtrip"),
            line_cond.result("line_condition"),
        ]
    )
    return report


def check_verify_pairs(tol: float = 1e-10) -> CheckResult:
    """verify_equivalence passes for every mapped pair of the grid."""
    agg = _Agg(tol)
    for m, n, beta in default_grid_cells(None):
        pme = PMEParams(m, n, beta)
        for _, ple in _branch_images(pme, None):
            rep = verify_equivalence(pme, ple, tol)
            agg.add(0.0 if rep.passed else 1.0)
            agg.add(rep.c_max_rel_dev)
    return agg.result("verify_equivalence_pairs")


def check_conjugacy(tol: float = 1e-6, span: float = 3.0) -> CheckResult:
    """Native flows mapped to the unified plane match direct integration."""
    sett = IntegrationSettings(rel_tol=1e-9, abs_tol=1e-12)
    agg = _Agg(tol)
    for (m, n), points in CONJUGACY_POINTS_PME.items():
        params = PMEParams(m, n, 1.0 / 3.0 if (m, n) == (2.0, 1.0) else 1.0)
        coeffs = unified_coefficients(params)
        for y0 in points:
            nat = integrate(pme_native_system(params), y0, (0.0, span / coeffs.sqrt_abs_b), sett)
            mapped = pme_trajectory_to_unified(nat, params)
            uni = integrate(unified_system(coeffs), mapped.states[0], (0.0, span), sett)
            agg.add(compare_trajectories(mapped, uni))
    ple_cases = {(3.0, 1.0): 1.0 / 3.0, (1.25, 2.5): 0.4}
    for (p, n), points in CONJUGACY_POINTS_PLE.items():
        params = PLEParams(p, n, ple_cases[(p, n)])
        coeffs = unified_coefficients(params)
        for y0 in points:
            nat = integrate(ple_native_system_xy(params), y0, (0.0, span / coeffs.sqrt_abs_b), sett)
            mapped = ple_trajectory_to_unified(nat, params)
            uni = integrate(unified_system(coeffs), mapped.states[0], (0.0, span), sett)
            agg.add(compare_trajectories(mapped, uni))
    return agg.result("conjugacy")


def check_closed_forms(tol: float = 1e-8) -> CheckResult:
    """Residual oracle on all closed-form profiles (50 interior points each)."""
    profiles = [
        solutions.barenblatt_pme(2.0, 1.0, 1.0),
        solutions.barenblatt_ple(3.0, 1.0, 1.0),
        solutions.dipole_pme(2.0, 1.0, 1.0),
        solutions.dipole_derivative_ple(3.0, 1.0, 1.0),
    ]
    for n in (3.0, 4.0, 5.0):
        profiles.append(solutions.loewner_nirenberg_pme(n, 1.0))
        profiles.append(solutions.yamabe_ple(n, 1.0))
    agg = _Agg(tol)
    for prof in profiles:
        agg.add(solutions.max_residual(prof, count=50))
    return agg.result("closed_form_residuals")


def check_yamabe_profiles(tol: float = 1e-6) -> CheckResult:
    """Mapped profile samples land on the exact parabola trajectory."""
    agg = _Agg(tol)
    for n in (3.0, 4.0, 5.0):
        for prof in (solutions.loewner_nirenberg_pme(n, 1.0), solutions.yamabe_ple(n, 1.0)):
            for eta in np.geomspace(0.1, 10.0, 40):
                smp = prof.sample([float(eta)])[0]
                state = profile_to_state(smp, prof.params)
                agg.add(state.psi - yamabe_curve(n, state.phi))
    return agg.result("yamabe_profiles_on_curve")


def check_yamabe_slope_field(tol: float = 1e-12) -> CheckResult:
    """The parabola is tangent to the unified field at 100 sample points."""
    agg = _Agg(tol)
    for n in (3.0, 4.0, 5.0):
        m_s = critical_exponents(n).m_s
        coeffs = unified_coefficients(PMEParams(m_s, n, 0.0, SimilarityType.TYPE_II))
        for phi in np.linspace(-2.0, 2.0, 100):
            psi = yamabe_curve(n, float(phi))
            dpsi, dphi = unified_rhs((psi, float(phi)), coeffs)
            # the curve has dPsi/dPhi = -n*phi/2; tangency kills this combination
            agg.add(dpsi + n * phi / 2.0 * dphi)
    return agg.result("yamabe_slope_field")


def check_critical_case(tol_c3: float = 1e-12) -> list[CheckResult]:
    """c3 = -1 in the critical reduction; the map limit converges linearly."""
    c3_agg = _Agg(tol_c3)
    for n in (3.0, 4.0, 5.0):
        crit = critical_exponents(n)
        cm = unified_coefficients(PMEParams(crit.m_c, n, 0.7))
        cp = unified_coefficients(PLEParams(crit.p_c, n, 0.7))
        c3_agg.add(cm.c3 + 1.0)
        c3_agg.add(cp.c3 + 1.0)
        c3_agg.add(0.0 if (cm.const_term == 0 and cm.critical) else 1.0)
        c3_agg.add(0.0 if (cp.const_term == 0 and cp.critical) else 1.0)

    # Linear convergence of the branch limit m -> m_c: halving eps halves the gap.
    ratio_agg = _Agg(0.25)
    beta = 0.7
    for n in (3.0, 4.0, 5.0):
        m_c = critical_exponents(n).m_c
        for sign in (1.0, -1.0):
            devs_n, devs_b = [], []
            for eps in (1e-3, 5e-4, 2.5e-4):
                img = pme_to_ple(PMEParams(m_c + sign * eps, n, beta), Branch.BRANCH1)
                devs_n.append(abs(img.n - (n - 1.0)))
                devs_b.append(abs(img.beta - beta * (n - 2.0) / (n - 1.0)))
            for devs in (devs_n, devs_b):
                ratio_agg.add(devs[0] / devs[1] - 2.0)
                ratio_agg.add(devs[1] / devs[2] - 2.0)
    return [c3_agg.result("critical_c3"), ratio_agg.result("critical_limit_linear")]


def check_line_trajectories(tol: float = 1e-8, span: float = 5.0) -> CheckResult:
    """Orbits started on an invariant line stay on it."""
    sett = IntegrationSettings(rel_tol=1e-10, abs_tol=1e-13)
    agg = _Agg(tol)
    cases = []
    for lb in line_betas_pme(2.0, 1.0):
        cases.append(unified_coefficients(PMEParams(2.0, 1.0, lb)))
    for lb in line_betas_ple(3.0, 1.0):
        cases.append(unified_coefficients(PLEParams(3.0, 1.0, lb)))
    for coeffs in cases:
        line = straight_line(coeffs)
        if line is None:
            agg.add(math.inf)
            continue
        a1, a2 = line
        traj = integrate(unified_system(coeffs), (0.01, a1 * 0.01 + a2), (0.0, span), sett)
        agg.add(float(np.max(np.abs(traj.states[:, 1] - a1 * traj.states[:, 0] - a2))))
    return agg.result("line_trajectories")


def check_mass_conservation(tol: float = 1e-6) -> CheckResult:
    """Source-type solution mass is time independent (quadrature oracle)."""
    prof = solutions.barenblatt_pme(2.0, 1.0, 1.0)
    m1 = solutions.mass_integral(prof, prof.params, t=1.0)
    m2 = solutions.mass_integral(prof, prof.params, t=2.0)
    agg = _Agg(tol)
    agg.add(abs(m1 - m2) / abs(m1))
    return agg.result("mass_conservation")


def run_default_verification(tol_identities: float | None = None) -> dict:
    """Run the whole suite; returns the JSON-ready report dictionary."""
    tol_id = 1e-10 if tol_identities is None else tol_identities
    report = check_identity_grid(tol_coeff=tol_id)
    report.checks.append(check_verify_pairs(tol=tol_id))
    report.checks.append(check_conjugacy())
    report.checks.append(check_closed_forms())
    report.checks.append(check_yamabe_profiles())
    report.checks.append(check_yamabe_slope_field())
    report.checks.extend(check_critical_case())
    report.checks.append(check_line_trajectories())
    report.checks.append(check_mass_conservation())
    return report.as_dict()
