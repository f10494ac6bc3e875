"""
Command-line front end.

    weakvalues scenario list
    weakvalues scenario run <file.json | builtin-name>
    weakvalues <kind> [--delta ... --T ... --seed ...]

Each run writes a CSV whose leading ``#`` lines carry the relation being
checked and the fully defaulted configuration. Exit codes: 0 success,
2 invalid scenario, 3 model or runtime error.
"""
import argparse
import csv
import io
import sys
from pathlib import Path

import numpy as np

from . import adiabatic, impulsive
from . import pointer as ptr
from .ensemble import run_ensemble, write_readings_csv
from .errors import ParseError, ValidationError, WeakValueError
from .hilbert import TwoStateVector, eig_biorthogonal, expectation, weak_value
from .scenario import (BUILTIN, KINDS, builtin_config, config_from_dict, default_for_kind,
                       list_builtin, parse_scenario, resolve, serialize)

__all__ = ["run_scenario", "main"]

EXIT_OK, EXIT_VALIDATION, EXIT_RUNTIME = 0, 2, 3

RELATION = {
    "weakvalue": "A_w = <psi2|A|psi1> / <psi2|psi1>",
    "impulsive": "prob(Q) = sum_i |alpha_i|^2 exp(-(Q - a_i)^2 / delta^2)",
    "weak-ensemble": "mean reading -> <psi|A|psi> for delta >> |a_i|",
    "postselect": "post-selected pointer exp(-(Q - A_w)^2 / 2 delta^2) for large delta",
    "protective": "shift <E_i|A|E_i> with probability |<E_i|psi>|^2",
    "nonhermitian": "shift Re A_w^i with probability ~ |alpha_i exp(-i w_i T)|^2",
    "protect2sv": "H_eff = -lambda N (sigma_x + sigma_y + i sigma_z)",
    "kaon-toy": "|<K'|K>| = 1 / sqrt(1 - |<K_S|K_L>|^2)",
}


def _f(x):
    return format(float(x), ".17g")


def _grid(cfg, delta, centers):
    if cfg.grid:
        base = ptr.default_grid(delta, centers)
        return ptr.Grid(cfg.grid.get("M", base.points), cfg.grid.get("L", base.extent))
    return ptr.default_grid(delta, centers)


def _run_weakvalue(cfg, res, out, workers):
    aw = weak_value(res.observable, TwoStateVector(ket=res.pre, bra=res.post))
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["re", "im"])
    w.writerow([_f(aw.real), _f(aw.imag)])


def _run_impulsive(cfg, res, out, workers):
    spectrum = impulsive.eig_hermitian(res.observable)
    grid = _grid(cfg, cfg.delta, spectrum.eigenvalues)
    js = impulsive.entangle(res.pre, res.observable, ptr.gaussian_pointer(grid, cfg.delta))
    sampler = impulsive.ideal_sampler(js)
    report, readings = run_ensemble(lambda s: sampler(s).reading, cfg.samples, cfg.seed, workers=workers)
    write_readings_csv(out, readings, report=report)


def _run_weak_ensemble(cfg, res, out, workers):
    est, se = impulsive.weak_ensemble_estimate(res.pre, res.observable, cfg.delta,
                                               cfg.samples, cfg.seed, workers=workers)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["n", "estimate", "std_error", "expectation"])
    w.writerow([cfg.samples, _f(est), _f(se), _f(expectation(res.observable, res.pre))])


def _run_postselect(cfg, res, out, workers):
    tsv = TwoStateVector(ket=res.pre, bra=res.post)
    rep = impulsive.weak_limit_report(tsv, res.observable, cfg.delta)
    spectrum = impulsive.eig_hermitian(res.observable)
    grid = _grid(cfg, cfg.delta, spectrum.eigenvalues)
    js = impulsive.entangle(tsv.ket, res.observable, ptr.gaussian_pointer(grid, cfg.delta))
    _, prob = impulsive.post_select(js, tsv.bra)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["delta", "exact_mean", "weak_prediction", "im_weak_value", "success_prob"])
    w.writerow([_f(cfg.delta), _f(rep.exact_mean), _f(rep.weak_prediction),
                _f(rep.weak_value.imag), _f(prob)])


def _run_protective(cfg, res, out, workers):
    outcomes = adiabatic.protective_outcomes(res.hamiltonian, res.pre, res.observable)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["label", "shift", "probability", "simulated_shift"])
    for o in outcomes:
        sim = adiabatic.protective_shift(res.hamiltonian, o.label, res.observable,
                                         cfg.delta, cfg.T, steps=cfg.steps)
        w.writerow([o.label, _f(o.shift), _f(o.probability), _f(sim)])


def _run_nonhermitian(cfg, res, out, workers):
    outcomes, _ = adiabatic.adiabatic_nonhermitian_measure(
        res.hamiltonian, res.observable, res.pre, cfg.delta, cfg.T)
    report, labels = run_ensemble(lambda s: adiabatic.sample_outcome(outcomes, s).label,
                                  cfg.samples, cfg.seed, workers=workers)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["label", "shift", "re_weak", "im_weak", "probability", "empirical_frequency"])
    for o in outcomes:
        freq = np.count_nonzero(labels == o.label) / labels.size
        w.writerow([o.label, _f(o.shift), _f(o.weak_or_expectation.real),
                    _f(o.weak_or_expectation.imag), _f(o.probability), _f(freq)])


def _run_protect2sv(cfg, res, out, workers):
    setup = adiabatic.build_spin_protection(cfg.N, cfg.lam)
    heff = adiabatic.effective_hamiltonian(setup)
    target = weak_value(res.observable, eig_biorthogonal(heff).pair(0)).real
    grid = _grid(cfg, cfg.delta, [np.max(np.abs(np.linalg.eigvalsh(res.observable)))])
    run = adiabatic.simulate_protected_2sv(setup, res.observable, cfg.delta, cfg.T,
                                           steps=cfg.steps, grid=grid)
    adiabatic.write_scan_csv(out, [run], target)


def _run_kaon(cfg, res, out, workers):
    bs = eig_biorthogonal(adiabatic.kaon_toy_hamiltonian(cfg.epsilon))
    expected = 1 / np.sqrt(1 - cfg.epsilon**2)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["label", "epsilon", "fidelity", "expected"])
    for i, fid in enumerate(adiabatic.kaon_fidelity(bs)):
        w.writerow([i, _f(cfg.epsilon), _f(fid), _f(expected)])


_RUNNERS = {
    "weakvalue": _run_weakvalue,
    "impulsive": _run_impulsive,
    "weak-ensemble": _run_weak_ensemble,
    "postselect": _run_postselect,
    "protective": _run_protective,
    "nonhermitian": _run_nonhermitian,
    "protect2sv": _run_protect2sv,
    "kaon-toy": _run_kaon,
}


def run_scenario(cfg, workers=1):
    """Run a validated scenario and return the CSV text (metadata header + body)."""
    res = resolve(cfg)
    body = io.StringIO()
    _RUNNERS[cfg.kind](cfg, res, body, workers)
    header = [f"# kind: {cfg.kind}", f"# relation: {RELATION[cfg.kind]}",
              f"# seed: {cfg.seed}", f"# config: {serialize(cfg)}"]
    return "\n".join(header) + "\n" + body.getvalue()


def _load(source):
    if source in BUILTIN:
        return builtin_config(source)
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ValidationError("scenario", f"cannot read {source}: {exc.strerror}") from None
    return parse_scenario(text)


_OVERRIDES = [
    ("--seed", "seed", int), ("--out", "output", str), ("--samples", "samples", int),
    ("--delta", "delta", float), ("--T", "T", float), ("--N", "N", int),
    ("--lambda", "lambda", float), ("--theta", "theta", float), ("--epsilon", "epsilon", float),
    ("--steps", "steps", int), ("--pre", "pre_state", str), ("--post", "post_state", str),
    ("--observable", "observable", str), ("--system", "system", str),
]


def _add_overrides(parser):
    for flag, dest, typ in _OVERRIDES:
        parser.add_argument(flag, dest=dest, type=typ, default=None)
    parser.add_argument("--grid-m", dest="grid_m", type=int, default=None)
    parser.add_argument("--grid-l", dest="grid_l", type=float, default=None)
    parser.add_argument("--workers", type=int, default=1, help="threads for ensemble sampling")


def _apply_overrides(doc, args):
    for _, dest, _ in _OVERRIDES:
        value = getattr(args, dest, None)
        if value is not None:
            doc[dest] = value
    grid = dict(doc.get("grid") or {})
    if getattr(args, "grid_m", None) is not None:
        grid["M"] = args.grid_m
    if getattr(args, "grid_l", None) is not None:
        grid["L"] = args.grid_l
    if grid:
        doc["grid"] = grid
    return doc


def build_parser():
    parser = argparse.ArgumentParser(prog="weakvalues", description="Weak-value measurement simulator")
    sub = parser.add_subparsers(dest="command", required=True)
    scen = sub.add_parser("scenario", help="run or list scenarios")
    scen_sub = scen.add_subparsers(dest="action", required=True)
    run = scen_sub.add_parser("run", help="run a JSON scenario file or a built-in by name")
    run.add_argument("source")
    _add_overrides(run)
    scen_sub.add_parser("list", help="list built-in scenarios")
    for kind in KINDS:
        _add_overrides(sub.add_parser(kind, help=f"run a {kind} scenario"))
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "scenario" and args.action == "list":
        print(list_builtin())
        return EXIT_OK
    try:
        if args.command == "scenario":
            cfg = _load(args.source)
            cfg = config_from_dict(_apply_overrides(cfg.to_dict(), args))
        else:
            cfg = config_from_dict(_apply_overrides(default_for_kind(args.command), args))
    except (ParseError, ValidationError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    try:
        text = run_scenario(cfg, workers=args.workers)
    except WeakValueError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
