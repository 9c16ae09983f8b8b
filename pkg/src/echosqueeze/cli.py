"""Command-line driver: scans, fringes, decoherence tables, Husimi grids, checks.

Every subcommand writes CSV (comma separated, UTF-8, LF, header row, empty
field for unavailable values).  Floats are written with ``repr`` so they
parse back exactly.  Settings come from flags, then a key=value config file,
then built-in defaults, in that order of precedence.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import analytics as an
from . import checks
from . import protocols as pr
from .decoherence import (
    CollisionScenario,
    DecoherenceParams,
    cavity_signal_factor,
    collision_contrast,
    max_tolerable_collisions,
    max_tolerable_asymptote,
    spontaneous_budget,
    spontaneous_signal_factor,
)
from .dicke import husimi_grid

SCAN_HEADER = [
    "n_atoms", "protocol", "mu",
    "sensitivity_analytic", "sensitivity_numeric", "sensitivity_dn", "qcr_bound",
    "pmf", "naf", "heisenberg_limit", "sql",
    "sensitivity_over_n", "numeric_over_n", "qcr_over_n", "pmf_over_n", "naf_over_sqrt_n",
]
FRINGE_HEADER = [
    "n_atoms", "protocol", "mu", "phi", "marker",
    "signal", "noise", "model_signal", "model_noise",
]
DECOHERENCE_HEADER = ["quantity", "n_atoms", "mu", "n_collided", "value", "reference"]
STAGES = ("initial", "post-squeeze", "post-phase", "final")


@dataclass(frozen=True)
class Grid:
    start: float
    stop: float
    count: int

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("grid count must be positive")
        if self.stop < self.start:
            raise ValueError("grid stop must not be below start")

    def values(self) -> list[float]:
        return [float(v) for v in np.linspace(self.start, self.stop, self.count)]

    @classmethod
    def parse(cls, text: str) -> "Grid":
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid must be start:stop:count, got {text!r}")
        return cls(float(parts[0]), float(parts[1]), int(parts[2]))


@dataclass
class ScanConfig:
    n_atoms: list[int] = field(default_factory=lambda: [100])
    mu_grid: Grid = Grid(0.0, math.pi / 2, 200)
    phi_grid: Grid = Grid(-0.3, 0.3, 121)
    protocols: list[str] = field(default_factory=lambda: ["GESP_E"])
    mu_values: Optional[list[float]] = None
    detection_noise: float = 0.0
    decoherence: Optional[DecoherenceParams] = None
    output_path: str = "-"
    seed: int = 0           # reserved; nothing here is random
    numeric_cutoff: int = 512
    threads: int = 1

    def __post_init__(self):
        if not self.n_atoms:
            raise ValueError("at least one atom number is required")
        if any(n < 1 for n in self.n_atoms):
            raise ValueError("atom numbers must be positive")
        if self.detection_noise < 0:
            raise ValueError("detection noise must be non-negative")
        if self.threads < 1:
            raise ValueError("threads must be positive")

    def mus(self) -> list[float]:
        return list(self.mu_values) if self.mu_values else self.mu_grid.values()


# --- formatting -------------------------------------------------------------

def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return "" if math.isnan(value) else repr(value)
    return str(value)


def write_csv(path: str, header: Sequence[str], rows) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise SystemExit(f"echosqueeze: cannot write {path}: {exc.strerror}") from None


def pool_map(fn, items, threads: int) -> list:
    """Ordered map; results come back in input order whatever the completion order."""
    if threads <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def _ratio(a, b):
    return None if a is None or b in (None, 0) else a / b


# --- scan-mu ----------------------------------------------------------------

def scan_point(n: int, kind: pr.Kind, mu: float, dn: float, cutoff: int) -> list:
    S = n / 2
    if kind is pr.Kind.CESP:
        sens = an.cesp_sensitivity(n, mu)
        pmf, naf = an.cesp_pmf(n, mu), 1.0
    else:
        sens = an.gesp_sensitivity(n, mu, kind)
        pmf, naf = an.gesp_pmf_naf(n, mu, kind)
    numeric = None
    if n <= cutoff:
        numeric = pr.numeric_sensitivity(pr.build_protocol(kind, pr.Form.SIMPLIFIED, mu), n)
    # slope S*M over QPN A*sqrt(S/2) and detection noise in quadrature
    with_dn = None
    if sens is not None and not math.isnan(naf):
        denom = math.hypot(naf * math.sqrt(S / 2), dn)
        with_dn = S * pmf / denom if denom > 0 else None
    bound = an.qcr_bound(n, mu, kind)
    return [
        n, kind.value, mu, sens, numeric, with_dn, bound, pmf, naf, float(n), math.sqrt(n),
        _ratio(sens, n), _ratio(numeric, n), bound / n, pmf / n, naf / math.sqrt(n),
    ]


def scan_rows(cfg: ScanConfig) -> list[list]:
    kinds = [pr.as_kind(p) for p in cfg.protocols]
    for k in kinds:
        if k not in (pr.Kind.GESP_E, pr.Kind.GESP_O, pr.Kind.CESP):
            raise ValueError(f"scan-mu takes GESP_E, GESP_O or CESP, not {k.value} (cat protocols have fixed mu)")
    points = [(n, k, mu) for n in cfg.n_atoms for k in kinds for mu in cfg.mus()]
    return pool_map(
        lambda p: scan_point(p[0], p[1], p[2], cfg.detection_noise, cfg.numeric_cutoff),
        points, cfg.threads,
    )


def cmd_scan_mu(cfg: ScanConfig) -> None:
    write_csv(cfg.output_path, SCAN_HEADER, scan_rows(cfg))


# --- fringe -----------------------------------------------------------------

def _default_mu(kind: pr.Kind, n: int) -> float:
    if kind is pr.Kind.CESP:
        return pr.optimal_cesp_mu(n)
    if kind.value.startswith("SCSP"):
        return math.pi / 2
    return math.pi / 4


def _scsp_matched(kind: pr.Kind, n: int) -> bool:
    return (n % 2 == 0) == (kind is pr.Kind.SCSP_E)


def hop_phase(kind: pr.Kind, n: int, mu: float) -> Optional[float]:
    """Hopping operating point pi/(2M); None for the anti-symmetric CESP fringe."""
    if kind is pr.Kind.CESP:
        return None
    if kind.value.startswith("SCSP"):
        m = an.pmf_naf(n, mu, "SCSP_MATCHED" if _scsp_matched(kind, n) else "SCSP_CROSSED").M
        return math.pi / (2 * m)
    if mu <= 0:
        return None
    return an.hopping_operating_point(n, mu)


def _model(kind: pr.Kind, n: int, mu: float, phi: float) -> tuple[Optional[float], Optional[float]]:
    if kind is pr.Kind.CESP:
        f = an.cesp_fringe_model(n, phi)
        return f.signal, f.noise
    if kind.value.startswith("SCSP"):
        S = n / 2
        if _scsp_matched(kind, n):
            return S * math.cos(2 * S * phi), S * abs(math.sin(2 * S * phi))
        sig = S * an.signed_pow(math.cos(phi), n - 1)
        r = math.sqrt(2 * S - 1)
        noise = math.sqrt((2 * S - 1) * S / 2) * abs(math.sin(phi * r)) if abs(phi) * r < math.pi / 4 else None
        return sig, noise
    if mu <= 0:
        return None, None
    f = an.gesp_fringe_model(n, mu, phi)
    return f.signal, f.noise


def fringe_rows(cfg: ScanConfig) -> list[list]:
    kinds = [pr.as_kind(p) for p in cfg.protocols]
    jobs = []
    for n in cfg.n_atoms:
        for kind in kinds:
            mus = [math.pi / 2] if kind.value.startswith("SCSP") else (cfg.mu_values or [_default_mu(kind, n)])
            for mu in mus:
                phis = [(phi, "") for phi in cfg.phi_grid.values()]
                hop = hop_phase(kind, n, mu)
                if hop is not None:
                    phis += [(-hop, "hop-"), (hop, "hop+")]
                phis.sort(key=lambda t: (t[0], t[1]))
                spec = pr.build_protocol(kind, pr.Form.SIMPLIFIED, mu)
                jobs += [(n, kind, mu, spec, phi, marker) for phi, marker in phis]

    def point(job):
        n, kind, mu, spec, phi, marker = job
        sig, noise = pr.signal_and_noise(spec, n, phi)
        msig, mnoise = _model(kind, n, mu, phi)
        return [n, kind.value, mu, phi, marker, sig, noise, msig, mnoise]

    return pool_map(point, jobs, cfg.threads)


def cmd_fringe(cfg: ScanConfig) -> None:
    write_csv(cfg.output_path, FRINGE_HEADER, fringe_rows(cfg))


# --- decoherence ------------------------------------------------------------

def decoherence_rows(cfg: ScanConfig, n_collided: Sequence[int], delta_given: bool) -> list[list]:
    rows = []
    mus = cfg.mus()
    for mu in mus:
        rows.append(["max_tolerable", None, mu, None, max_tolerable_collisions(mu), max_tolerable_asymptote(mu)])
    for n in cfg.n_atoms:
        for n_col in n_collided:
            if n_col > n:
                continue
            for mu in mus:
                scn = CollisionScenario(n, n_col, mu)
                rows.append(["contrast", n, mu, n_col, collision_contrast(scn), None])
    base = cfg.decoherence
    if base is None:
        return rows
    for n in cfg.n_atoms:
        params = DecoherenceParams(base.kappa, base.delta_abs, base.gamma_sp, base.g, n, base.alpha, base.chi)
        for mu in mus:
            budget = spontaneous_budget(mu, params)
            delta = params.delta_abs if delta_given else budget.delta_opt
            cav = cavity_signal_factor(mu, params, delta)
            spont = spontaneous_signal_factor(mu, params, delta)
            rows += [
                ["cavity_factor", n, mu, None, cav, None],
                ["spontaneous_factor", n, mu, None, spont, None],
                ["combined_factor", n, mu, None, cav * spont, budget.net_factor],
                ["net_factor", n, mu, None, budget.net_factor, budget.mu_bound],
                ["delta_opt", n, mu, None, budget.delta_opt, None],
                ["alpha", n, mu, None, budget.alpha, None],
            ]
    return rows


def cmd_decoherence(cfg: ScanConfig, n_collided: Sequence[int], delta_given: bool) -> None:
    write_csv(cfg.output_path, DECOHERENCE_HEADER, decoherence_rows(cfg, n_collided, delta_given))


# --- husimi -----------------------------------------------------------------

def husimi_rows(n: int, kind: pr.Kind, mu: float, phi: float, stage: str, n_theta: int, n_phi: int):
    if stage not in STAGES:
        raise ValueError(f"unknown stage {stage!r}; choose from {', '.join(STAGES)}")
    spec = pr.build_protocol(kind, pr.Form.SIMPLIFIED, mu)
    state = pr.stages(spec, n, phi)[stage]
    grid = husimi_grid(state, n_theta, n_phi)
    header = ["theta\\phi"] + [fmt(float(p)) for p in grid.phi]
    rows = [[float(t)] + [float(v) for v in row] for t, row in zip(grid.theta, grid.values)]
    return header, rows


def cmd_husimi(n: int, kind, mu: float, phi: float, stage: str, grid: tuple[int, int], out: str) -> None:
    header, rows = husimi_rows(n, pr.as_kind(kind), mu, phi, stage, grid[0], grid[1])
    write_csv(out, header, rows)


# --- verify -----------------------------------------------------------------

def cmd_verify(only=None, stream=None) -> int:
    stream = stream or sys.stdout
    results = checks.run_checks(only)
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        stream.write(f"{status}  {r.group:<11} {r.name:<{width}}  measured={r.measured:.3e}  tol={r.tolerance:.1e}\n")
    failed = sum(not r.passed for r in results)
    stream.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return 1 if failed else 0


# --- argument handling ------------------------------------------------------

def read_config(path: str) -> dict[str, str]:
    """Flat key=value file; '#' starts a comment, dashes in keys become underscores."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise SystemExit(f"echosqueeze: {path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            out[key.strip().replace("-", "_")] = value.strip()
    return out


def _split(text: str) -> list[str]:
    return [t for t in text.replace(",", " ").split() if t]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", help="atom number(s), comma separated")
    common.add_argument("--protocol", help="GESP_E, GESP_O, CESP, SCSP_E, SCSP_O (comma separated)")
    common.add_argument("--mu", help="explicit squeezing value(s), radians; overrides --mu-grid")
    common.add_argument("--mu-grid", help="start:stop:count, radians")
    common.add_argument("--phi-grid", help="start:stop:count, radians")
    common.add_argument("--out", help="output path ('-' for stdout)")
    common.add_argument("--config", help="key=value settings file; flags take precedence")
    common.add_argument("--dn", help="detection noise added in quadrature")
    common.add_argument("--numeric-cutoff", help="largest N given a simulated sensitivity column")
    common.add_argument("--threads", help="worker threads")
    common.add_argument("--seed", help="reserved; computations are deterministic")

    p = argparse.ArgumentParser(prog="echosqueeze", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("scan-mu", parents=[common], help="sensitivity, bound, PMF and NAF against mu")
    sub.add_parser("fringe", parents=[common], help="signal and noise against phi")
    d = sub.add_parser("decoherence", parents=[common], help="collision, cavity and emission factors")
    d.add_argument("--kappa", help="cavity decay rate")
    d.add_argument("--delta", help="|detuning|; defaults to the optimum at each mu")
    d.add_argument("--gamma", help="spontaneous emission rate")
    d.add_argument("--g", help="single-atom coupling")
    d.add_argument("--alpha", help="emission penalty factor; defaults to the plateau PMF")
    d.add_argument("--chi", help="squeezing rate, only used in reported rates")
    d.add_argument("--n-collided", help="collided atom counts, comma separated")
    h = sub.add_parser("husimi", parents=[common], help="Q distribution after a protocol stage")
    h.add_argument("--phi", help="phase shift applied in the phase stage")
    h.add_argument("--stage", help=f"one of {', '.join(STAGES)}")
    h.add_argument("--grid", help="n_theta:n_phi")
    v = sub.add_parser("verify", help="run the invariant checks")
    v.add_argument("--only", help=f"comma separated groups: {', '.join(checks.GROUPS)}")
    return p


class Settings:
    """Lookup with flag > config file > default precedence."""

    def __init__(self, args: argparse.Namespace):
        self.args = vars(args)
        self.file = read_config(args.config) if getattr(args, "config", None) else {}

    def get(self, key: str, default=None):
        val = self.args.get(key)
        if val is not None:
            return val
        return self.file.get(key, default)

    def has(self, key: str) -> bool:
        return self.get(key) is not None


def config_from(settings: Settings, defaults: dict) -> ScanConfig:
    get = lambda k: settings.get(k, defaults.get(k))
    mu_text = get("mu")
    return ScanConfig(
        n_atoms=[int(x) for x in _split(str(get("n")))],
        mu_grid=Grid.parse(str(get("mu_grid"))),
        phi_grid=Grid.parse(str(get("phi_grid"))),
        protocols=[x.upper().replace("-", "_") for x in _split(str(get("protocol")))],
        mu_values=[float(x) for x in _split(str(mu_text))] if mu_text is not None else None,
        detection_noise=float(get("dn")),
        output_path=str(get("out")),
        seed=int(get("seed")),
        numeric_cutoff=int(get("numeric_cutoff")),
        threads=int(get("threads")),
    )


DEFAULTS = {
    "n": "100", "protocol": "GESP_E", "mu": None, "mu_grid": f"0:{math.pi / 2!r}:200",
    "phi_grid": "-0.3:0.3:121", "out": "-", "dn": "0", "numeric_cutoff": "512",
    "threads": "1", "seed": "0",
}


def _glue_negative_values(argv: Sequence[str]) -> list[str]:
    """Turn '--phi-grid -0.3:0.3:61' into '--phi-grid=-0.3:0.3:61' so argparse accepts it."""
    out = []
    for tok in argv:
        if (out and out[-1].startswith("--") and "=" not in out[-1]
                and len(tok) > 1 and tok[0] == "-" and (tok[1].isdigit() or tok[1] == ".")):
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    args = build_parser().parse_args(_glue_negative_values(argv))
    try:
        if args.command == "verify":
            only = _split(args.only) if args.only else None
            return cmd_verify(only)
        settings = Settings(args)
        if args.command == "scan-mu":
            cmd_scan_mu(config_from(settings, DEFAULTS))
        elif args.command == "fringe":
            cmd_fringe(config_from(settings, dict(DEFAULTS, protocol="SCSP_E", n="20")))
        elif args.command == "decoherence":
            cfg = config_from(settings, dict(DEFAULTS, mu_grid="0.05:1.5:30"))
            kappa = float(settings.get("kappa", 1.0))
            params = DecoherenceParams(
                kappa=kappa,
                delta_abs=float(settings.get("delta", 1.0)),
                gamma_sp=float(settings.get("gamma", 1.0)),
                g=float(settings.get("g", 5.0)),
                n_atoms=max(cfg.n_atoms),
                alpha=float(settings.get("alpha")) if settings.has("alpha") else None,
                chi=float(settings.get("chi", 1.0)),
            )
            cfg.decoherence = params
            n_col = [int(x) for x in _split(str(settings.get("n_collided", "0,1,2,5,10,20,50")))]
            cmd_decoherence(cfg, n_col, settings.has("delta"))
        elif args.command == "husimi":
            cfg = config_from(settings, dict(DEFAULTS, n="40", mu=str(math.pi / 2)))
            grid = [int(x) for x in str(settings.get("grid", "64:128")).split(":")]
            if len(grid) != 2:
                raise ValueError("grid must be n_theta:n_phi")
            cmd_husimi(
                cfg.n_atoms[0], cfg.protocols[0], cfg.mus()[0],
                float(settings.get("phi", 0.0)), str(settings.get("stage", "post-squeeze")),
                (grid[0], grid[1]), cfg.output_path,
            )
    except ValueError as exc:
        print(f"echosqueeze: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
