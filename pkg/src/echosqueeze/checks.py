"""Named invariant groups run by ``echosqueeze verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from . import analytics as an
from . import protocols as pr
from .decoherence import CollisionScenario, collision_oracle, collision_signal


@dataclass(frozen=True)
class CheckResult:
    group: str
    name: str
    measured: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.measured <= self.tolerance)


def reductions(n_values=(4, 9, 16, 33, 64)) -> Iterator[CheckResult]:
    mus = np.linspace(0.0, math.pi / 2, 5)
    phis = np.linspace(-0.3, 0.3, 5)
    for kind in pr.Kind:
        for n in n_values:
            worst = max(pr.verify_reduction(kind, n, mu, phi) for mu in mus for phi in phis)
            yield CheckResult("reductions", f"{kind.value} N={n}", worst, 1e-9)
    # pi pulse about the auxiliary axis, or about x (leaves the squeezed |x> alone)
    for n in (8, 9):
        worst = max(
            pr.lpai_core_residual(kind, n, mu, phi, pi_axis)
            for kind in pr.Kind
            for pi_axis in (None, "x")
            for mu in mus for phi in phis
        )
        yield CheckResult("reductions", f"LPAI middle steps N={n}", worst, 1e-10)


def oracle(n_values=range(4, 25)) -> Iterator[CheckResult]:
    mus = [0.1 * k for k in range(1, 16)]
    for version in ("GESP_E", "GESP_O"):
        worst = 0.0
        for n in n_values:
            for mu in mus:
                numeric = pr.numeric_sensitivity(pr.build_protocol(version, "SIMPLIFIED", mu), n)
                analytic = an.gesp_sensitivity(n, mu, version)
                worst = max(worst, abs(analytic - numeric) / numeric)
        yield CheckResult("oracle", f"{version} analytic vs numeric (rel)", worst, 1e-6)
    worst = 0.0
    for n in range(4, 41, 6):
        for mu in (0.05, 0.1, 0.2):
            numeric = pr.numeric_sensitivity(pr.build_protocol("CESP", "SIMPLIFIED", mu), n)
            analytic = an.cesp_sensitivity(n, mu)
            worst = max(worst, abs(analytic - numeric) / analytic)
    yield CheckResult("oracle", "CESP closed form vs numeric (rel)", worst, 1e-8)


def qcr(n_values=(10, 11, 100, 101)) -> Iterator[CheckResult]:
    mus = np.linspace(0.0, math.pi / 2, 100)[1:]
    for n in n_values:
        excess = 0.0
        for mu in mus:
            for version in ("GESP_E", "GESP_O"):
                s = an.gesp_sensitivity(n, mu, version)
                if s is not None:
                    excess = max(excess, s / an.qcr_bound(n, mu, version) - 1)
            excess = max(excess, an.cesp_sensitivity(n, mu) / an.qcr_bound(n, mu, "CESP") - 1)
        yield CheckResult("qcr", f"N={n} max relative excess over bound", max(excess, 0.0), 1e-9)


def collisions(n_max: int = 14) -> Iterator[CheckResult]:
    for mu in (0.2, 0.5, 1.0, math.pi / 2):
        worst = 0.0
        for n in range(1, n_max + 1):
            for n_col in range(n + 1):
                scn = CollisionScenario(n, n_col, mu)
                worst = max(worst, abs(collision_signal(scn) - collision_oracle(scn)))
        yield CheckResult("collisions", f"mu={mu:.4f} closed form vs oracle", worst, 1e-10)


def cat(n_max: int = 61) -> Iterator[CheckResult]:
    wrong = sum(pr.cat_orientation(n) != ("x" if n % 2 == 0 else "y") for n in range(2, n_max + 1))
    yield CheckResult("cat", f"orientation mismatches for N=2..{n_max}", float(wrong), 0.0)


def plateau(n_atoms: int = 1000) -> Iterator[CheckResult]:
    p = an.plateau(n_atoms)
    vals = [an.gesp_sensitivity(n_atoms, mu, v)
            for mu in np.linspace(p.mu_lo, p.mu_hi, 50) for v in ("GESP_E", "GESP_O")]
    dev = max(abs(v - p.value) / p.value for v in vals)
    yield CheckResult("plateau", f"N={n_atoms} max deviation from N/sqrt2", dev, 0.05)
    yield CheckResult("plateau", f"N={n_atoms} max/min - 1", max(vals) / min(vals) - 1, 0.1)


def fringes() -> Iterator[CheckResult]:
    phis = np.linspace(-0.3, 0.3, 61)
    for kind in (pr.Kind.SCSP_E, pr.Kind.SCSP_O):
        spec = pr.build_protocol(kind)
        for n in (20, 21):
            matched = (n % 2 == 0) == (kind is pr.Kind.SCSP_E)
            S = n / 2
            worst = max(abs(pr.signal(spec, n, p) - an.scsp_fringe(n, matched, p).signal) / S for p in phis)
            label = "matched" if matched else "crossed"
            yield CheckResult("fringes", f"{kind.value} N={n} ({label})", worst, 1e-8)


GROUPS: dict[str, Callable[[], Iterator[CheckResult]]] = {
    "reductions": reductions,
    "oracle": oracle,
    "qcr": qcr,
    "collisions": collisions,
    "cat": cat,
    "plateau": plateau,
    "fringes": fringes,
}


def run_checks(only=None) -> list[CheckResult]:
    names = list(GROUPS) if not only else list(only)
    unknown = [n for n in names if n not in GROUPS]
    if unknown:
        raise ValueError(f"unknown check group(s): {', '.join(unknown)}")
    return [res for name in names for res in GROUPS[name]()]
