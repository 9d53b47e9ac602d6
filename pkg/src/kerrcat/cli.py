"""Command-line driver: reproduce the study figures, validate, run custom configs.

Subcommands:
  figure <name>|all   write the data behind a named figure (fig1..fig11)
  validate            run the cross-module invariant checks, exit nonzero on failure
  custom <config>     run an arbitrary experiment described by a flat JSON config
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .evolution import (
    ANALYTIC_CASES,
    KerrParams,
    TimeGrid,
    analytic_state_at,
    autocorrelation,
    evolve,
)
from .entropy import RenyiPair, entropy_series, renyi_bound, renyi_uncertainty_sum
from .moments import (
    a_power_even_cat,
    a_power_oracle,
    a_power_three_cat,
    ladder_expectation_coherent,
    ladder_moment_oracle,
    moment_scale,
    moment_series,
    x2_even_cat,
    x3_three_cat,
    x_moment_oracle,
)
from .schedule import detect_bursts, match_report, visible_burst_times
from .states import (
    FockState,
    SuperpositionSpec,
    TruncationError,
    coherent_state,
    fidelity,
    superposed_state,
    truncation_dim,
)
from .wigner import PhaseSpaceGrid, count_lobes, default_grid, wigner_field


@dataclass
class ExperimentConfig:
    """Flat key-value experiment description (JSON on disk)."""

    l: int = 1
    h: int = 0
    nu: float = 20.0
    theta: float = math.pi / 4
    chi: float = 1.0
    t_start: float = 0.0
    t_stop: float = 1.0
    t_points: int = 2001
    moment_observable: str = "x"
    moment_powers: list = field(default_factory=list)
    entropy_zeta: float | None = None
    entropy_eta: float | None = None
    wigner_times: list = field(default_factory=list)
    wigner_points: int = 401
    n_max: int | None = None
    out_dir: str = "out"

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            raw = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path}: not valid JSON ({exc})") from None
        if not isinstance(raw, dict):
            raise ValueError(f"{path}: config must be a flat JSON object")
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ValueError(f"{path}: unknown config keys {sorted(unknown)}")
        cfg = cls(**raw)
        cfg.validate()
        return cfg

    def validate(self) -> None:
        SuperpositionSpec(self.l, self.h, self.nu, self.theta)  # raises on bad fields
        if self.chi <= 0:
            raise ValueError("field 'chi': must be positive")
        if not 0 <= self.t_start < self.t_stop <= 1:
            raise ValueError("fields 't_start'/'t_stop': need 0 <= start < stop <= 1")
        if self.t_points < 2:
            raise ValueError("field 't_points': need at least 2")
        if self.moment_observable not in ("x", "p"):
            raise ValueError("field 'moment_observable': must be 'x' or 'p'")
        for k in self.moment_powers:
            if int(k) != k or k < 1:
                raise ValueError("field 'moment_powers': entries must be positive integers")
        if (self.entropy_zeta is None) != (self.entropy_eta is None):
            raise ValueError("fields 'entropy_zeta'/'entropy_eta': set both or neither")
        if self.entropy_zeta is not None:
            RenyiPair(self.entropy_zeta, self.entropy_eta)
        for t in self.wigner_times:
            if not 0 <= t <= 1:
                raise ValueError("field 'wigner_times': entries must lie in [0, 1]")
        if not self.moment_powers and self.entropy_zeta is None and not self.wigner_times:
            raise ValueError("empty observable list: request moments, entropy, or wigner data")

    def spec(self) -> SuperpositionSpec:
        return SuperpositionSpec(self.l, self.h, self.nu, self.theta)


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    print(f"wrote {path}")


def _series_file(out: Path, name: str, series) -> None:
    _write(out / f"{name}.csv", series.to_csv())


def _wigner_files(out: Path, name: str, spec: SuperpositionSpec, fraction: float,
                  chi: float, points: int, n_max: int | None) -> None:
    params = KerrParams(chi)
    state = superposed_state(spec, n_max)
    moved = evolve(state, params, fraction * params.t_rev)
    grid = default_grid(moved, points)
    fld = wigner_field(moved, grid)
    header = (
        f"# l={spec.l} h={spec.h} nu={spec.nu} theta={spec.theta} chi={chi}"
        f" t_over_Trev={fraction} n_max={state.n_max} grid={points}x{points}\n"
    )
    _write(out / f"{name}.csv", header + fld.to_csv())
    _write(out / f"{name}.dat", fld.to_gnuplot_matrix())


def _moment_figure(out: Path, name: str, l: int, nu: float, power: int, stop: float,
                   chi: float, points: int, n_max: int | None) -> None:
    spec = SuperpositionSpec(l, 0, nu)
    grid = TimeGrid.uniform(points, 0.0, stop)
    series = moment_series(spec, "x", power, KerrParams(chi), grid, n_max)
    _series_file(out, name, series)


def _entropy_figure(out: Path, name: str, l: int, nu: float, stop: float,
                    chi: float, points: int, n_max: int | None) -> None:
    spec = SuperpositionSpec(l, 0, nu)
    grid = TimeGrid.uniform(points, 0.0, stop)
    series = entropy_series(spec, KerrParams(chi), grid, RenyiPair(2 / 3, 2.0), n_max)
    _series_file(out, name, series)


FIGURES = {
    "fig1": "Wigner portrait, coherent nu=20 at t = T_rev/4 (four-lobe superposition)",
    "fig2": "<x^4> series, coherent nu=100, t/T_rev in [0,1]",
    "fig3": "Renyi sum (2/3, 2), coherent nu=35, [0, 1/2]",
    "fig4": "Wigner portraits, 2-cat nu=20 at t = 0 and T_rev/4",
    "fig5": "Wigner portrait, 2-cat nu=20 at t = T_rev/8",
    "fig6": "<x^2> series, 2-cat nu=100, [0,1]",
    "fig7": "<x^4> [0,1] and <x^6> [0,1/2] series plus Renyi sum nu=30, 2-cat",
    "fig8": "Wigner portraits, 3-cat nu=20 at t = 0 and T_rev/9",
    "fig9": "<x^3> series, 3-cat nu=100, [0,1]; Wigner portrait 3-cat nu=20 at T_rev/18",
    "fig10": "Renyi sum, 3-cat nu=30, [0,1/2]; companion <x^6> and <x^9> series [0,1/2]",
    "fig11": "<x^8> series, 4-cat nu=100, [0, 1/2]",
}


def run_figure(name: str, out_dir: str | Path = "out", n_max: int | None = None,
               grid_points: int | None = None, chi: float = 1.0) -> None:
    """Write the data files behind one named figure with its study parameters."""
    if name not in FIGURES:
        raise KeyError(f"unknown figure {name!r}; choose from {sorted(FIGURES)} or 'all'")
    out = Path(out_dir)
    sp = grid_points or 2001  # series points
    wp = grid_points or 401   # wigner points per axis
    print(f"{name}: {FIGURES[name]}")
    if name == "fig1":
        _wigner_files(out, "fig1_wigner_coherent_quarter", SuperpositionSpec(1, 0, 20.0),
                      0.25, chi, wp, n_max)
    elif name == "fig2":
        _moment_figure(out, "fig2_x4_coherent_nu100", 1, 100.0, 4, 1.0, chi, sp, n_max)
    elif name == "fig3":
        _entropy_figure(out, "fig3_renyi_coherent_nu35", 1, 35.0, 0.5, chi,
                        grid_points or 1001, n_max)
    elif name == "fig4":
        _wigner_files(out, "fig4a_wigner_cat2_t0", SuperpositionSpec(2, 0, 20.0), 0.0,
                      chi, wp, n_max)
        _wigner_files(out, "fig4b_wigner_cat2_quarter", SuperpositionSpec(2, 0, 20.0), 0.25,
                      chi, wp, n_max)
    elif name == "fig5":
        _wigner_files(out, "fig5_wigner_cat2_eighth", SuperpositionSpec(2, 0, 20.0), 0.125,
                      chi, wp, n_max)
    elif name == "fig6":
        _moment_figure(out, "fig6_x2_cat2_nu100", 2, 100.0, 2, 1.0, chi, sp, n_max)
    elif name == "fig7":
        _moment_figure(out, "fig7a_x4_cat2_nu100", 2, 100.0, 4, 1.0, chi, sp, n_max)
        _moment_figure(out, "fig7b_x6_cat2_nu100", 2, 100.0, 6, 0.5, chi, sp, n_max)
        _entropy_figure(out, "fig7c_renyi_cat2_nu30", 2, 30.0, 0.5, chi,
                        grid_points or 1001, n_max)
    elif name == "fig8":
        _wigner_files(out, "fig8a_wigner_cat3_t0", SuperpositionSpec(3, 0, 20.0), 0.0,
                      chi, wp, n_max)
        _wigner_files(out, "fig8b_wigner_cat3_ninth", SuperpositionSpec(3, 0, 20.0), 1 / 9,
                      chi, wp, n_max)
    elif name == "fig9":
        _moment_figure(out, "fig9_x3_cat3_nu100", 3, 100.0, 3, 1.0, chi, sp, n_max)
        _wigner_files(out, "fig9_wigner_cat3_eighteenth", SuperpositionSpec(3, 0, 20.0),
                      1 / 18, chi, wp, n_max)
    elif name == "fig10":
        _entropy_figure(out, "fig10_renyi_cat3_nu30", 3, 30.0, 0.5, chi,
                        grid_points or 1001, n_max)
        _moment_figure(out, "fig10b_x6_cat3_nu100", 3, 100.0, 6, 0.5, chi, sp, n_max)
        _moment_figure(out, "fig10c_x9_cat3_nu100", 3, 100.0, 9, 0.5, chi, sp, n_max)
    elif name == "fig11":
        _moment_figure(out, "fig11_x8_cat4_nu100", 4, 100.0, 8, 0.5, chi, sp, n_max)


def run_custom(config: ExperimentConfig) -> None:
    config.validate()
    out = Path(config.out_dir)
    params = KerrParams(config.chi)
    spec = config.spec()
    grid = TimeGrid.uniform(config.t_points, config.t_start, config.t_stop)
    tag = f"l{config.l}h{config.h}_nu{config.nu:g}"
    for power in config.moment_powers:
        series = moment_series(spec, config.moment_observable, int(power), params, grid,
                               config.n_max)
        _series_file(out, f"custom_{tag}_{config.moment_observable}{int(power)}", series)
    if config.entropy_zeta is not None:
        pair = RenyiPair(config.entropy_zeta, config.entropy_eta)
        series = entropy_series(spec, params, grid, pair, config.n_max)
        _series_file(out, f"custom_{tag}_renyi", series)
    for frac in config.wigner_times:
        label = f"{frac:g}".replace(".", "p")
        _wigner_files(out, f"custom_{tag}_wigner_t{label}", spec, float(frac), config.chi,
                      config.wigner_points, config.n_max)


# validation suite -----------------------------------------------------------

def _check(name, fn):
    try:
        detail = fn()
        return (name, True, detail or "")
    except AssertionError as exc:
        return (name, False, str(exc))


def _validate_checks(rng: np.random.Generator) -> list[tuple[str, bool, str]]:
    params = KerrParams(1.0)
    t_rev = params.t_rev
    checks = []

    def revivals():
        worst = 1.0
        for l, nu in [(1, 20.0), (2, 20.0), (3, 20.0), (4, 20.0), (1, 100.0)]:
            s = superposed_state(SuperpositionSpec(l, 0, nu))
            worst = min(worst, fidelity(s, evolve(s, params, t_rev)))
        assert worst >= 1 - 1e-12, f"revival fidelity {worst}"
        return f"min fidelity {worst:.17g}"

    checks.append(_check("exact revival at T_rev", revivals))

    def analytic():
        worst = 1.0
        for case, entry in ANALYTIC_CASES.items():
            spec = SuperpositionSpec(entry.l, 0, 20.0)
            n_max = truncation_dim(20.0)
            target = analytic_state_at(spec, case, n_max)
            got = evolve(superposed_state(spec, n_max), params,
                         float(entry.time_fraction) * t_rev)
            worst = min(worst, fidelity(got, target))
        assert worst >= 1 - 1e-10, f"analytic-state fidelity {worst}"
        return f"min fidelity over {len(ANALYTIC_CASES)} cases {worst:.12g}"

    checks.append(_check("fractional-revival superpositions", analytic))

    def closed_forms():
        worst = 0.0
        for _ in range(20):
            nu = float(rng.uniform(0.5, 100.0))
            t = float(rng.uniform(0.0, t_rev))
            n_max = truncation_dim(nu) + 12
            alpha = math.sqrt(nu) * np.exp(1j * math.pi / 4)
            cs = evolve(coherent_state(nu, math.pi / 4, n_max), params, t)
            r, s = int(rng.integers(0, 3)), int(rng.integers(0, 5))
            err = abs(ladder_expectation_coherent(alpha, r, s, 1.0, t)
                      - ladder_moment_oracle(cs, r, s))
            worst = max(worst, err / max(abs(ladder_moment_oracle(cs, r, s)),
                                         moment_scale(nu, r, s)))
            k = int(rng.integers(1, 4))
            c2 = evolve(superposed_state(SuperpositionSpec(2, 0, nu), n_max), params, t)
            err = abs(a_power_even_cat(nu, math.pi / 4, 1.0, t, k) - a_power_oracle(c2, 2 * k))
            worst = max(worst, err / max(abs(a_power_oracle(c2, 2 * k)), moment_scale(nu, 0, 2 * k)))
            worst = max(worst, abs(x2_even_cat(nu, 1.0, t) - x_moment_oracle(c2, 2))
                        / abs(x_moment_oracle(c2, 2)))
            c3 = evolve(superposed_state(SuperpositionSpec(3, 0, nu), n_max), params, t)
            err = abs(a_power_three_cat(nu, math.pi / 4, 1.0, t, k) - a_power_oracle(c3, 3 * k))
            worst = max(worst, err / max(abs(a_power_oracle(c3, 3 * k)), moment_scale(nu, 0, 3 * k)))
            err = abs(x3_three_cat(nu, 1.0, t) - x_moment_oracle(c3, 3))
            worst = max(worst, err / max(abs(x_moment_oracle(c3, 3)), moment_scale(nu, 0, 3)))
        assert worst < 1e-9, f"closed-form vs oracle relative error {worst}"
        return f"worst scaled error {worst:.3e}"

    checks.append(_check("closed forms against matrix oracle", closed_forms))

    def parity():
        spec = SuperpositionSpec(2, 0, 100.0)
        grid = TimeGrid.uniform(201)
        worst = max(np.max(np.abs(moment_series(spec, "x", p, params, grid).values))
                    for p in (1, 3))
        assert worst < 1e-10, f"odd moment leak {worst}"
        return f"max |<x^odd>| = {worst:.3e}"

    checks.append(_check("parity selection for the 2-cat", parity))

    def schedule():
        spec = SuperpositionSpec(1, 0, 100.0)
        series = moment_series(spec, "x", 4, params, TimeGrid.uniform(2001))
        rep = match_report(detect_bursts(series), visible_burst_times(1, 4), 1e-3)
        assert rep.complete, f"misses {rep.misses}, spurious {rep.spurious}"
        return f"{len(rep.matched)} bursts matched"

    checks.append(_check("x^4 burst schedule, coherent nu=100", schedule))

    def entropy_bound():
        pair = RenyiPair(2 / 3, 2.0)
        bound = renyi_bound(pair)
        vac = FockState(np.eye(32, dtype=complex)[0])
        sat = renyi_uncertainty_sum(vac, pair)
        assert abs(sat - bound) < 1e-6, f"vacuum saturation defect {abs(sat - bound)}"
        s = evolve(superposed_state(SuperpositionSpec(2, 0, 30.0)), params, 0.37 * t_rev)
        val = renyi_uncertainty_sum(s, pair)
        assert val >= bound - 1e-6, f"bound violated: {val} < {bound}"
        return f"vacuum defect {abs(sat - bound):.2e}"

    checks.append(_check("Renyi uncertainty bound", entropy_bound))

    def wigner_quick():
        vac = FockState(np.eye(24, dtype=complex)[0])
        fld = wigner_field(vac, PhaseSpaceGrid.square(6.0, 201))
        peak = fld.values.max()
        assert abs(peak - 1 / math.pi) < 1e-10, f"vacuum peak {peak}"
        assert abs(fld.integral() - 1) < 1e-3, f"normalization {fld.integral()}"
        state = evolve(coherent_state(20.0), params, t_rev / 4)
        lobes = count_lobes(wigner_field(state, default_grid(state, 201)))
        assert lobes == 4, f"expected 4 lobes, found {lobes}"
        return "vacuum peak 1/pi, 4-lobe portrait"

    checks.append(_check("Wigner field basics", wigner_quick))

    def truncation_guard():
        try:
            coherent_state(100.0, math.pi / 4, n_max=50)
        except TruncationError:
            return "undersized basis rejected"
        raise AssertionError("n_max = nu/2 accepted without complaint")

    checks.append(_check("truncation guard", truncation_guard))

    def mutation_guard():
        nu, n_max = 20.0, truncation_dim(20.0)
        spec = SuperpositionSpec(1, 0, nu)
        base = superposed_state(spec, n_max)
        n = np.arange(n_max + 1)
        # wrong spectrum n^2 must break the exact revival
        bad_rev = FockState(base.amplitudes * np.exp(-1j * np.pi * n**2))
        assert fidelity(base, bad_rev) < 0.9, "n^2 spectrum not caught by revival check"
        # conjugated propagator must break the quarter-revival superposition
        t = t_rev / 4
        flipped = FockState(base.amplitudes * np.exp(+1j * n * (n - 1.0) * t))
        target = analytic_state_at(spec, "coherent@T/4", n_max)
        assert fidelity(flipped, target) < 0.9, "sign flip not caught by analytic check"
        return "sign flip and n^2 mutations detected"

    checks.append(_check("mutation sensitivity", mutation_guard))
    return checks


def run_validate(seed: int = 1234) -> int:
    """Run the invariant suite; returns a process exit code."""
    checks = _validate_checks(np.random.default_rng(seed))
    failures = 0
    for name, ok, detail in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {name}" + (f": {detail}" if detail else ""))
        failures += 0 if ok else 1
    print(f"{len(checks) - failures}/{len(checks)} checks passed")
    return 0 if failures == 0 else 1


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="kerrcat",
        description="Kerr-oscillator dynamics of multi-component cat states",
    )
    parser.add_argument("--version", action="version", version=f"kerrcat {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_fig = sub.add_parser("figure", help="write the data files behind a named figure")
    p_fig.add_argument("name", help="fig1..fig11, or 'all'")
    p_fig.add_argument("--out-dir", default="out")
    p_fig.add_argument("--n-max", type=int, default=None)
    p_fig.add_argument("--grid-points", type=int, default=None)
    p_fig.add_argument("--threads", type=int, default=None)

    p_val = sub.add_parser("validate", help="run the invariant suite")
    p_val.add_argument("--seed", type=int, default=1234)
    p_val.add_argument("--threads", type=int, default=None)

    p_cus = sub.add_parser("custom", help="run an experiment from a JSON config")
    p_cus.add_argument("config")
    p_cus.add_argument("--out-dir", default=None)
    p_cus.add_argument("--n-max", type=int, default=None)
    p_cus.add_argument("--grid-points", type=int, default=None)
    p_cus.add_argument("--threads", type=int, default=None)

    args = parser.parse_args(argv)
    if getattr(args, "threads", None):
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ[var] = str(args.threads)

    try:
        if args.command == "figure":
            names = sorted(FIGURES) if args.name == "all" else [args.name]
            for name in names:
                run_figure(name, args.out_dir, args.n_max, args.grid_points)
            return 0
        if args.command == "validate":
            return run_validate(args.seed)
        if args.command == "custom":
            cfg = ExperimentConfig.from_file(args.config)
            if args.out_dir:
                cfg.out_dir = args.out_dir
            if args.n_max:
                cfg.n_max = args.n_max
            if args.grid_points:
                cfg.t_points = args.grid_points
            run_custom(cfg)
            return 0
    except (KeyError, ValueError, TruncationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc.strerror}: {exc.filename}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
