"""Command-line frontend: orbit runs, closure scans, spectra and ladder checks.

Every command accepts the potential as --a/--nu/--b (or --lambda X as
shorthand for a=-1, nu=-1, b=-X), reads defaults from a JSON config file
given with --config (explicit flags win), writes CSV/JSON artifacts to
-o/--output, and prints a one-line summary to stdout. Exit codes: 0 ok,
1 domain/runtime error (with a JSON error report on stdout), 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Any

from .errors import DomainError, OrbitkitError
from . import classical, potentials, quantum

__all__ = ["main", "parse_kappa", "RunConfig"]

COMMANDS = ("orbit", "closure", "bertrand-scan", "spectrum", "ladder", "wkb", "runge-lenz")


def parse_kappa(text: str) -> Fraction:
    """Rational kappa from 'q/p' text or a decimal (continued-fraction rounded)."""
    text = str(text).strip()
    if "/" in text:
        num_s, _, den_s = text.partition("/")
        try:
            num, den = int(num_s), int(den_s)
        except ValueError as exc:
            raise DomainError(f"cannot parse kappa {text!r}") from exc
        if den == 0:
            raise DomainError("kappa denominator must be nonzero")
        return Fraction(num, den)
    try:
        value = float(text)
    except ValueError as exc:
        raise DomainError(f"cannot parse kappa {text!r}") from exc
    if value <= 0.0 or not math.isfinite(value):
        raise DomainError("kappa must be a positive finite number")
    return Fraction(value).limit_denominator(64)


def _parse_nr_range(text: str) -> list[int]:
    text = str(text).strip()
    if ".." in text:
        lo_s, _, hi_s = text.partition("..")
        lo, hi = int(lo_s), int(hi_s)
        if hi < lo:
            raise DomainError(f"empty n_r range {text!r}")
        return list(range(lo, hi + 1))
    return [int(text)]


def _parse_float_list(value) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    return [float(tok) for tok in str(value).split(",") if tok.strip()]


class _Usage(Exception):
    """Invalid invocation (missing/conflicting parameters): exit code 2."""


@dataclass
class RunConfig:
    """Merged CLI + config-file parameters for one command invocation."""

    command: str
    a: float | None = None
    nu: float | None = None
    b: float | None = None
    lam: float | None = None
    L: float | None = None
    E: float | None = None
    kappa: str | None = None
    l: int | None = None
    nr: str | None = None
    t_end: float | None = None
    tol: float | None = None
    grid_n: int | None = None
    r_max: float | None = None
    direction: str | None = None
    max_denominator: int = 64
    nu_list: Any = None
    ecc_list: Any = None
    energies: Any = None
    output: str | None = None
    format: str | None = None

    def potential(self) -> potentials.CombinedPotential:
        if self.lam is not None:
            if any(v is not None for v in (self.a, self.nu, self.b)):
                raise _Usage("--lambda is exclusive with --a/--nu/--b")
            return potentials.CombinedPotential.alkali(self.lam)
        if self.a is None or self.nu is None:
            raise _Usage("potential requires --a and --nu (or --lambda)")
        return potentials.CombinedPotential(a=self.a, nu=self.nu, b=self.b or 0.0)

    def angular_momentum(self, pot: potentials.CombinedPotential) -> float:
        if self.L is not None:
            if self.L <= 0.0:
                raise _Usage("L must be positive")
            return self.L
        if self.kappa is not None:
            try:
                kappa = parse_kappa(self.kappa)
            except DomainError as exc:
                raise _Usage(str(exc)) from exc
            return potentials.angular_momentum_for_kappa(pot, float(kappa))
        raise _Usage("need --L or --kappa")


_CONFIG_KEYS = {
    "command", "a", "nu", "b", "lambda", "L", "E", "kappa", "l", "nr",
    "t_end", "tol", "grid_n", "r_max", "direction", "max_denominator",
    "nu_list", "ecc_list", "energies", "output", "format",
}


def _load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise DomainError("config file must hold a JSON object")
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")
    return data


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orbitkit",
        description="Closed orbits and energy ladders in a*r^nu + b/r^2 potentials.",
        epilog="Environment: ORBITKIT_THREADS caps scan parallelism (default 1).",
    )
    parser.add_argument("--config", help="JSON config file; explicit flags override it")
    sub = parser.add_subparsers(dest="command")

    def add_common(p):
        p.add_argument("--config", help="JSON config file; explicit flags override it")
        p.add_argument("--a", type=float, default=None)
        p.add_argument("--nu", type=float, default=None)
        p.add_argument("--b", type=float, default=None)
        p.add_argument("--lambda", dest="lam", type=float, default=None,
                       help="alkali shorthand: a=-1, nu=-1, b=-lambda")
        p.add_argument("--tol", type=float, default=None, help="integration/solver tolerance")
        p.add_argument("-o", "--output", default=None)
        p.add_argument("--format", choices=("csv", "json"), default=None)

    p = sub.add_parser("orbit", help="integrate an orbit and write its CSV track")
    add_common(p)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--kappa", default=None)
    p.add_argument("--E", type=float, default=None)
    p.add_argument("--t-end", dest="t_end", type=float, default=None)

    p = sub.add_parser("closure", help="rational-closure analysis at (E, L)")
    add_common(p)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--kappa", default=None)
    p.add_argument("--E", type=float, default=None)
    p.add_argument("--max-denominator", dest="max_denominator", type=int, default=64)

    p = sub.add_parser("bertrand-scan", help="closure classification over exponents")
    add_common(p)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--nu-list", dest="nu_list", default=None,
                   help="comma-separated exponents")
    p.add_argument("--ecc-list", dest="ecc_list", default=None,
                   help="comma-separated eccentricity samples")

    p = sub.add_parser("spectrum", help="Numerov bound states vs reference energies")
    add_common(p)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--nr", default=None, help="radial node count or range like 0..3")
    p.add_argument("--grid-n", dest="grid_n", type=int, default=None)
    p.add_argument("--r-max", dest="r_max", type=float, default=None)

    p = sub.add_parser("ladder", help="apply a ladder operator and report the overlap")
    add_common(p)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--nr", default=None)
    p.add_argument("--grid-n", dest="grid_n", type=int, default=None)
    p.add_argument("--r-max", dest="r_max", type=float, default=None)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--up", dest="direction", action="store_const", const="up")
    group.add_argument("--down", dest="direction", action="store_const", const="down")

    p = sub.add_parser("wkb", help="semiclassical spectrum values")
    add_common(p)
    p.add_argument("--l", type=int, default=None)
    p.add_argument("--nr", default=None)

    p = sub.add_parser("runge-lenz", help="track the eccentricity vector along an orbit")
    add_common(p)
    p.add_argument("--L", type=float, default=None)
    p.add_argument("--kappa", default=None)
    p.add_argument("--E", type=float, default=None)
    p.add_argument("--t-end", dest="t_end", type=float, default=None)
    return parser


def _merge_config(args: argparse.Namespace) -> RunConfig:
    cfg = _load_config(args.config) if getattr(args, "config", None) else {}
    command = getattr(args, "command", None) or cfg.get("command")
    if command not in COMMANDS:
        raise _Usage(f"no command given (choose from {', '.join(COMMANDS)})")

    def pick(attr, key=None, cast=None):
        value = getattr(args, attr, None)
        if value is None:
            value = cfg.get(key or attr)
        if value is not None and cast is not None:
            value = cast(value)
        return value

    return RunConfig(
        command=command,
        a=pick("a", cast=float),
        nu=pick("nu", cast=float),
        b=pick("b", cast=float),
        lam=pick("lam", "lambda", cast=float),
        L=pick("L", cast=float),
        E=pick("E", cast=float),
        kappa=pick("kappa", cast=str),
        l=pick("l", cast=int),
        nr=pick("nr", cast=str),
        t_end=pick("t_end", cast=float),
        tol=pick("tol", cast=float),
        grid_n=pick("grid_n", cast=int),
        r_max=pick("r_max", cast=float),
        direction=pick("direction", cast=str),
        max_denominator=pick("max_denominator", cast=int) or 64,
        nu_list=pick("nu_list"),
        ecc_list=pick("ecc_list"),
        energies=pick("energies"),
        output=pick("output"),
        format=pick("format", cast=str),
    )


_ARTIFACT_FORMAT = {
    "orbit": "csv",
    "closure": "json",
    "bertrand-scan": "csv",
    "spectrum": "csv",
    "ladder": "json",
    "wkb": "json",
    "runge-lenz": "csv",
}


def _require(cfg: RunConfig, *fields: str) -> None:
    missing = [f for f in fields if getattr(cfg, f) is None]
    if missing:
        raise _Usage(f"{cfg.command}: missing required parameter(s): {', '.join(missing)}")
    natural = _ARTIFACT_FORMAT[cfg.command]
    if cfg.format is not None and cfg.format != natural:
        raise _Usage(f"{cfg.command} emits {natural}, not {cfg.format}")


def _write_json(payload: dict, cfg: RunConfig) -> None:
    text = json.dumps(payload, indent=2, sort_keys=False)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _make_grid(cfg: RunConfig, pot, l: int) -> quantum.RadialGrid | None:
    if cfg.grid_n is None and cfg.r_max is None:
        return None
    l_prime = quantum.effective_l(l, pot.b)
    nr_values = _parse_nr_range(cfg.nr) if cfg.nr else [3]
    base = quantum.default_grid(pot, l_prime, n_r_max=max(nr_values) + 2)
    n = cfg.grid_n or base.n
    r_max = cfg.r_max or base.r_max
    return quantum.RadialGrid(r_min=r_max / n, r_max=r_max, n=n)


def _cmd_orbit(cfg: RunConfig) -> None:
    _require(cfg, "E", "t_end")
    pot = cfg.potential()
    L = cfg.angular_momentum(pot)
    init = classical.pericenter_state(pot, cfg.E, L)
    traj = classical.integrate_orbit(pot, init, cfg.t_end, tol=cfg.tol or 1e-10)
    if cfg.output:
        classical.emit_orbit_csv(traj, cfg.output)
    print(
        f"orbit: steps={traj.t.size} pericenters={traj.pericenters.shape[0]} "
        f"revolutions={traj.theta[-1] / (2.0 * math.pi):.6g} "
        f"energy_drift={traj.max_energy_drift:.3e}"
        + (f" -> {cfg.output}" if cfg.output else "")
    )


def _cmd_closure(cfg: RunConfig) -> None:
    _require(cfg, "E")
    pot = cfg.potential()
    L = cfg.angular_momentum(pot)
    report = classical.closure_analysis(
        pot, L, cfg.E, max_denominator=cfg.max_denominator, tol=cfg.tol or 1e-10
    )
    _write_json(report.to_json_dict(), cfg)
    if report.closed:
        print(
            f"closure: closed after {report.closure_period_revolutions} revolutions "
            f"(beta*kappa = {report.beta_kappa:.9g} ~ "
            f"{report.rational.numerator}/{report.rational.denominator}, "
            f"gap = {report.numeric_gap:.3e})"
        )
    else:
        print(f"closure: not closed (beta*kappa = {report.beta_kappa:.9g})")


def _cmd_bertrand_scan(cfg: RunConfig) -> None:
    _require(cfg)
    nu_values = _parse_float_list(cfg.nu_list) if cfg.nu_list else [-1.5, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0]
    ecc = _parse_float_list(cfg.ecc_list) if cfg.ecc_list else [0.1, 0.3, 0.6]
    b = cfg.b if cfg.b is not None else 0.0
    result = classical.bertrand_scan(
        nu_values, ecc, b=b, L=cfg.L or 1.0, tol=cfg.tol or 1e-10
    )
    if cfg.output:
        classical.emit_scan_csv(result, cfg.output)
    closed = ", ".join(f"{nu:g}" for nu in result.closed_exponents) or "none"
    print(
        f"bertrand-scan: {len(result.rows)} orbits, closed-for-all exponents: {closed}"
        + (f" -> {cfg.output}" if cfg.output else "")
    )


def _cmd_spectrum(cfg: RunConfig) -> None:
    _require(cfg, "l", "nr")
    pot = cfg.potential()
    nr_values = _parse_nr_range(cfg.nr)
    grid = _make_grid(cfg, pot, cfg.l)
    problem = quantum.RadialProblem.build(
        pot, cfg.l, grid=grid, n_r_max=max(nr_values) + 2
    )
    rows = []
    exact_branch = quantum.closed_form_energy(pot, problem.l_prime, 0) is not None
    label = "E_closed_form" if exact_branch else "E_wkb"
    for n_r in nr_values:
        sol = quantum.solve_radial(problem, n_r)
        if exact_branch:
            ref = quantum.closed_form_energy(pot, problem.l_prime, n_r)
        else:
            ref = quantum.wkb_energy(pot, sol.n)
        rows.append((cfg.l, problem.l_prime, n_r, sol.E, ref, abs(sol.E - ref)))
    if cfg.output:
        quantum.emit_spectrum_csv(rows, cfg.output, reference_label=label)
    worst = max(row[5] for row in rows)
    print(
        f"spectrum: l={cfg.l} l'={problem.l_prime:.9g} states={len(rows)} "
        f"max|E - {label}|={worst:.3e}" + (f" -> {cfg.output}" if cfg.output else "")
    )
    if not cfg.output:
        for row in rows:
            print(f"  n_r={row[2]}: E={row[3]:.12g} {label}={row[4]:.12g}")


def _cmd_ladder(cfg: RunConfig) -> None:
    _require(cfg, "l", "nr", "direction")
    pot = cfg.potential()
    nr_values = _parse_nr_range(cfg.nr)
    if len(nr_values) != 1:
        raise _Usage("ladder: --nr must be a single value")
    grid = _make_grid(cfg, pot, cfg.l)
    report = quantum.verify_ladder(pot, cfg.l, nr_values[0], cfg.direction, grid=grid)
    _write_json(report.to_json_dict(), cfg)
    if report.annihilated:
        print(f"ladder: {cfg.direction} from n_r={nr_values[0]} annihilated the state")
    else:
        print(
            f"ladder: {cfg.direction} from n_r={nr_values[0]} "
            f"overlap={report.overlap:.10f} (branch={report.branch})"
        )


def _cmd_wkb(cfg: RunConfig) -> None:
    _require(cfg, "l", "nr")
    pot = cfg.potential()
    l_prime = quantum.effective_l(cfg.l, pot.b)
    params = quantum.wkb_params(pot, l_prime)
    levels = []
    for n_r in _parse_nr_range(cfg.nr):
        n = quantum.spectral_index(pot, l_prime, n_r)
        levels.append({"n_r": n_r, "n": n, "E": quantum.wkb_energy(pot, n)})
    payload = {
        "l": cfg.l,
        "l_prime": l_prime,
        "alpha_nu": params.alpha_nu,
        "exponent": params.exponent,
        "n_offset": params.n_offset,
        "levels": levels,
    }
    _write_json(payload, cfg)
    print(
        f"wkb: alpha_nu={params.alpha_nu:.12g} exponent={params.exponent:.9g} "
        f"levels={len(levels)}"
    )


def _cmd_runge_lenz(cfg: RunConfig) -> None:
    _require(cfg, "E", "t_end")
    pot = cfg.potential()
    L = cfg.angular_momentum(pot)
    init = classical.pericenter_state(pot, cfg.E, L)
    traj = classical.integrate_orbit(pot, init, cfg.t_end, tol=cfg.tol or 1e-10)
    track = classical.runge_lenz_track(traj)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write("t,Rx,Ry,R_mag\n")
            for i in range(track.t.size):
                fh.write(
                    f"{track.t[i]:.17g},{track.Rx[i]:.17g},"
                    f"{track.Ry[i]:.17g},{track.magnitude[i]:.17g}\n"
                )
    summary = (
        f"runge-lenz: |R| in [{track.magnitude.min():.9g}, {track.magnitude.max():.9g}]"
    )
    if traj.pericenters.shape[0] >= 2:
        prec = classical.apsis_precession_per_radial_period(traj)
        summary += f" apsis_precession_per_radial_period={prec:.9g}"
    print(summary + (f" -> {cfg.output}" if cfg.output else ""))


_HANDLERS = {
    "orbit": _cmd_orbit,
    "closure": _cmd_closure,
    "bertrand-scan": _cmd_bertrand_scan,
    "spectrum": _cmd_spectrum,
    "ladder": _cmd_ladder,
    "wkb": _cmd_wkb,
    "runge-lenz": _cmd_runge_lenz,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge_config(args)
        _HANDLERS[cfg.command](cfg)
    except _Usage as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (OrbitkitError, OSError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}))
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
