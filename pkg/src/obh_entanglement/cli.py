"""Command-line front end: rates, negativity traces, Green values, convergence tables.

Exit status: 0 success, 2 configuration error, 3 numerical non-convergence.
All CSV output is UTF-8 with LF line endings and 17 significant digits.
"""
from __future__ import annotations

import argparse
import io
import sys
import warnings
from dataclasses import replace

import numpy as np

from .atom_dynamics import (AtomPair, InvariantViolation, environment_response,
                            freespace_collective, vacuum_rates_modes)
from .config import ConfigError, RunConfig, load, with_overrides
from .entanglement import negativity_trace
from .layered_green import (IllConditionedError, VanishingDenominatorError,
                            scattering_green_channels)
from .medium import GeometryError, LayerStack, LorentzModel, ObhGeometry, discretize_shell
from .sommerfeld import NonConvergenceError, QuadraturePolicy
from .specfun import DomainError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

NEGATIVITY_COLUMNS = ("t_gamma0", "rho_pp", "rho_mm", "rho_LL", "neg_eigen", "neg_closed")
CONVERGENCE_LAYERS = (5, 10, 20, 40)


def fmt(x):
    """17-significant-digit text for floats, plain text for everything else."""
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def csv_text(header, rows):
    lines = [",".join(header)]
    lines += [",".join(fmt(v) for v in row) for row in rows]
    return "\n".join(lines) + "\n"


def build_stack(cfg: RunConfig) -> LayerStack:
    geometry = ObhGeometry(cfg.a_s, cfg.a_c, cfg.eps_core)
    model = LorentzModel(cfg.omega_p, cfg.omega_0, cfg.gamma)
    stack = discretize_shell(geometry, model, cfg.shell_layers, cfg.sampling)
    if cfg.scenario == "vacuum":
        return LayerStack.vacuum(stack.radii)
    return stack


def build_policy(cfg: RunConfig) -> QuadraturePolicy:
    return QuadraturePolicy(rel_tol=cfg.rel_tol, branch_window=cfg.branch_window,
                            n_max=cfg.n_max, n_stop=cfg.n_stop, stop_tol=cfg.stop_tol)


def time_grid(cfg: RunConfig):
    return np.linspace(0.0, cfg.t_max, cfg.samples)


def cmd_rates(cfg: RunConfig) -> str:
    resp = environment_response(AtomPair(cfg.omega_a, cfg.r), build_stack(cfg), build_policy(cfg))
    r, s = resp.rates, resp.shifts
    rows = [
        ("gamma", r.gamma, r.gamma_err),
        ("gamma_ab", r.gamma_ab, r.gamma_ab_err),
        ("gamma_plus", r.gamma_plus, r.gamma_err + r.gamma_ab_err),
        ("gamma_minus", r.gamma_minus, r.gamma_err + r.gamma_ab_err),
        ("delta_ab", s.delta_ab, s.delta_ab_err),
        ("lamb_scattering", s.lamb, s.lamb_err),
        ("max_order", resp.max_order, 0),
        ("cap_hits", resp.cap_hits, 0),
        ("panels", resp.panels, 0),
        ("h_max", float(resp.h_max), 0),
    ]
    return csv_text(("quantity", "value", "error_bound"), rows)


def negativity_for(cfg: RunConfig):
    resp = environment_response(AtomPair(cfg.omega_a, cfg.r), build_stack(cfg), build_policy(cfg))
    return negativity_trace(resp.rates, resp.shifts, time_grid(cfg), cfg.doubled_negativity)


def cmd_negativity(cfg: RunConfig) -> str:
    trace = negativity_for(cfg)
    return csv_text(NEGATIVITY_COLUMNS, trace.rows())


def cmd_greens(cfg: RunConfig) -> str:
    res = scattering_green_channels(cfg.r_field, cfg.r_source, [cfg.phi_field - cfg.phi_source],
                                    cfg.z_field - cfg.z_source, cfg.omega_a, build_stack(cfg),
                                    build_policy(cfg))
    g = complex(res.values[0])
    rows = [(g.real, g.imag, float(res.errors[0]), res.max_order, res.panels)]
    return csv_text(("re_g_scattering", "im_g_scattering", "error_bound", "max_order", "panels"), rows)


def _rates_row(cfg):
    resp = environment_response(AtomPair(cfg.omega_a, cfg.r), build_stack(cfg), build_policy(cfg))
    r = resp.rates
    return r.gamma_plus, r.gamma_minus, resp.shifts.delta_ab, r.gamma_err + r.gamma_ab_err


def cmd_convergence(cfg: RunConfig) -> str:
    """Gamma_pm against n_max, rel_tol and the layer count, with successive changes."""
    sweeps = [
        ("n_max", [max(1, cfg.n_max // 4), max(1, cfg.n_max // 2), cfg.n_max]),
        ("rel_tol", [cfg.rel_tol * 100, cfg.rel_tol]),
        ("shell_layers", list(CONVERGENCE_LAYERS)),
    ]
    rows = []
    for name, values in sweeps:
        previous = None
        for v in values:
            gp, gm, dab, err = _rates_row(replace(cfg, **{name: v}))
            if previous is None:
                change = 0.0
            else:
                change = max(abs(gp - previous[0]) / max(abs(gp), 1e-300),
                             abs(gm - previous[1]) / max(abs(gm), 1e-300))
            rows.append((name, fmt(float(v)) if name == "rel_tol" else v, gp, gm, dab, err, change))
            previous = (gp, gm)
    # normalisation audit: the mode-sum form of the rates (eta^2/k^3 weight,
    # prefactor 3/4) against the closed-form vacuum Green function
    atoms = AtomPair(cfg.omega_a, cfg.r)
    modes = vacuum_rates_modes(atoms, build_policy(cfg))
    gab, _ = freespace_collective(2 * cfg.omega_a * cfg.r)
    ratio = modes.gamma
    rows.append(("prefactor_audit", "gamma_modes/gamma_closed", ratio, modes.gamma_ab / gab,
                 0.0, modes.gamma_err, abs(ratio - 1.0)))
    return csv_text(("parameter", "value", "gamma_plus", "gamma_minus", "delta_ab",
                     "error_bound", "rel_change"), rows)


COMMANDS = {
    "rates": cmd_rates,
    "negativity": cmd_negativity,
    "greens": cmd_greens,
    "convergence": cmd_convergence,
}


def build_parser():
    p = argparse.ArgumentParser(prog="obh-entangle", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", metavar="PATH", help="configuration file (defaults if omitted)")
    p.add_argument("--out", metavar="PATH", help="output file ('-' for stdout)")
    p.add_argument("--scenario", choices=("obh", "vacuum"))
    p.add_argument("--doubled-negativity", action="store_true",
                   help="report negativity with maximum 1 instead of 1/2")
    return p


def write_output(text, path):
    if path in (None, "-"):
        sys.stdout.buffer.write(text.encode("utf-8"))
        sys.stdout.flush()
        return
    with io.open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        cfg = load(args.config) if args.config else RunConfig()
        cfg = with_overrides(cfg, scenario=args.scenario, path=args.out,
                             doubled_negativity=True if args.doubled_negativity else None)
        cfg.validate()
    except (ConfigError, GeometryError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            text = COMMANDS[args.command](cfg)
    except (NonConvergenceError, DomainError, InvariantViolation, IllConditionedError,
            VanishingDenominatorError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    write_output(text, cfg.path)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
