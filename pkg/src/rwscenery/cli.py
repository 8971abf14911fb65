"""Command-line entry point.

Every run is described by a JSON config (``--config``) whose keys can be
overridden by flags. File names and formats are listed in docs/schema.md.
"""

import argparse
import json
import logging
import os
import sys

from .distinguish import distinguish
from .exceptions import (
    ContractError,
    InconclusiveDepthError,
    SceneryError,
    SingularSystemError,
    UnsupportedRegimeError,
)
from .measures import (
    DEFAULT_EPS,
    PeriodicOrbitMeasure,
    is_strongly_asymmetric,
    is_symmetric,
    scenery_measure_from_dict,
    step_measure_from_dict,
    validate,
    without_holding,
)
from .reconstruct import (
    build_matrix,
    residual,
    solve_asymmetric,
    solve_symmetric,
    symmetric_matrix,
    verify_structure,
)
from .record import (
    CylinderVector,
    RecordSequence,
    empirical_cylinders,
    exact_record_vector,
    simulate_record,
)
from .words import ColourAlphabet, canonical_order

log = logging.getLogger("rwscenery")

COMMANDS = ("order", "forward", "matrix", "reconstruct", "simulate", "estimate", "distinguish")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_CONTRACT = 3
EXIT_SINGULAR = 4
EXIT_INCONCLUSIVE = 5
EXIT_REGIME = 6


class UsageError(Exception):
    pass


def build_parser():
    p = argparse.ArgumentParser(
        prog="rwscenery",
        description="Record measures of random walks in random scenery: forward maps, "
        "reconstruction and distinguishing of periodic sceneries.",
    )
    p.add_argument("command_arg", nargs="?", choices=COMMANDS, metavar="COMMAND",
                   help="one of: " + ", ".join(COMMANDS))
    p.add_argument("--config", help="JSON run configuration")
    p.add_argument("--command", choices=COMMANDS)
    p.add_argument("--depth", type=int, help="cylinder depth n")
    p.add_argument("--length", type=int, help="record length T")
    p.add_argument("--seed", type=int)
    p.add_argument("--eps", type=float, help=f"singularity threshold (default {DEFAULT_EPS})")
    p.add_argument("--tol", type=float, help="divergence tolerance for distinguish")
    p.add_argument("--out", help="output directory (default: current directory)")
    p.add_argument("--threads", type=int, default=1,
                   help="accepted for compatibility; computations are sequential and "
                   "results never depend on it")
    p.add_argument("--mu", help="step measure as inline JSON")
    p.add_argument("--lambda", dest="lambda_", help="scenery measure as inline JSON")
    p.add_argument("--scenery", help="periodic scenery word (forward, simulate, estimate)")
    p.add_argument("--x", help="first periodic scenery (distinguish)")
    p.add_argument("--y", help="second periodic scenery (distinguish)")
    p.add_argument("--rho", help="record cylinder CSV to reconstruct from")
    p.add_argument("--record", help="record text file to estimate from")
    p.add_argument("--mode", choices=("auto", "asymmetric", "symmetric"))
    p.add_argument("--alphabet", help="colour symbols, e.g. 01")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def load_config(args):
    cfg = {}
    if args.config:
        try:
            with open(args.config) as fh:
                cfg = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
    overrides = {
        "command": args.command or args.command_arg,
        "depth": args.depth,
        "length": args.length,
        "seed": args.seed,
        "eps": args.eps,
        "tol": args.tol,
        "out": args.out,
        "scenery": args.scenery,
        "x": args.x,
        "y": args.y,
        "rho": args.rho,
        "record": args.record,
        "mode": args.mode,
        "alphabet": args.alphabet,
    }
    for key, inline in (("mu", args.mu), ("lambda", args.lambda_)):
        if inline is not None:
            try:
                overrides[key] = json.loads(inline)
            except json.JSONDecodeError as exc:
                raise UsageError(f"--{key} is not valid JSON: {exc}") from exc
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if cfg.get("command") not in COMMANDS:
        raise UsageError(f"command must be one of {', '.join(COMMANDS)}")
    return cfg


def _require(cfg, *keys):
    missing = [k for k in keys if cfg.get(k) is None]
    if missing:
        raise UsageError(f"command {cfg['command']!r} needs: {', '.join(missing)}")


def _depth(cfg, default=4):
    n = cfg.get("depth", default)
    if not isinstance(n, int) or n < 1:
        raise UsageError(f"depth must be a positive integer, got {n!r}")
    return n


def _mu(cfg):
    _require(cfg, "mu")
    return step_measure_from_dict(cfg["mu"])


def _lambda(cfg):
    if cfg.get("lambda") is not None:
        return scenery_measure_from_dict(cfg["lambda"])
    _require(cfg, "scenery")
    return PeriodicOrbitMeasure(cfg["scenery"])


def _alphabet(cfg, default=None):
    if cfg.get("alphabet"):
        return ColourAlphabet(tuple(cfg["alphabet"]))
    return default


def _write(out, name, text):
    os.makedirs(out, exist_ok=True)
    path = os.path.join(out, name)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    log.info("wrote %s", path)
    return path


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_order(cfg, out):
    order = canonical_order(_alphabet(cfg, ColourAlphabet()), _depth(cfg))
    print("\n".join(order.entries))


def cmd_forward(cfg, out):
    rho = exact_record_vector(_mu(cfg), _lambda(cfg), _depth(cfg))
    _write(out, "rho.csv", rho.to_csv())


def cmd_matrix(cfg, out):
    mu = _mu(cfg)
    A = build_matrix(mu, _depth(cfg), _alphabet(cfg, ColourAlphabet()))
    reference = None
    if A.holding:
        try:
            reference = build_matrix(without_holding(mu), A.order.depth, A.order.alphabet)
        except ContractError:
            reference = None
    report = verify_structure(A, mu, reference=reference)
    _write(out, "matrix.csv", A.to_csv())
    _write(out, "blocks.json", A.to_json() + "\n")
    _write(
        out,
        "structure.json",
        _dump(
            {
                "ok": report.ok,
                "nonzeros": report.nonzeros,
                "violations": [list(v) for v in report.violations],
                "holding_reference": reference is not None,
                "measure_violations": [list(v) for v in validate(mu)],
            }
        ),
    )
    print("structure ok" if report.ok else f"{len(report.violations)} structure violations")


def cmd_reconstruct(cfg, out):
    _require(cfg, "rho")
    mu = _mu(cfg)
    eps = cfg.get("eps", DEFAULT_EPS)
    try:
        with open(cfg["rho"]) as fh:
            rho = CylinderVector.from_csv(fh, _alphabet(cfg))
    except OSError as exc:
        raise UsageError(f"cannot read {cfg['rho']}: {exc}") from exc
    n = rho.order.depth
    if cfg.get("depth") is not None and cfg["depth"] < n:
        rho = rho.truncate(_depth(cfg))
        n = rho.order.depth
    mode = cfg.get("mode", "auto")
    if mode == "auto":
        N = max(1, n - 1)
        if is_strongly_asymmetric(mu, N, eps).ok or not is_symmetric(mu, N, eps):
            mode = "asymmetric"
        else:
            mode = "symmetric"
    if mode == "asymmetric":
        A = build_matrix(mu, n, rho.order.alphabet)
        x = solve_asymmetric(A, rho, eps)
    else:
        A = symmetric_matrix(mu, n, rho.order.alphabet)
        x = solve_symmetric(mu, rho, eps)
    res = residual(A, x, rho)
    _write(out, "scenery.csv", x.to_csv())
    _write(out, "reconstruct.json", _dump({"mode": mode, "depth": n, "residual": res, "eps": eps}))
    print(f"{mode} reconstruction, depth {n}, residual {res:.3e}")


def _simulate(cfg):
    _require(cfg, "scenery", "length", "seed")
    return simulate_record(_mu(cfg), cfg["scenery"], cfg["length"], cfg["seed"])


def cmd_simulate(cfg, out):
    rec = _simulate(cfg)
    _write(out, "record.txt", rec.to_text())


def cmd_estimate(cfg, out):
    n = _depth(cfg)
    if cfg.get("record"):
        try:
            with open(cfg["record"]) as fh:
                rec = RecordSequence.from_text(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read {cfg['record']}: {exc}") from exc
    else:
        rec = _simulate(cfg)
    if cfg.get("length") is not None and cfg["length"] < n:
        raise UsageError("length must be at least depth for estimate")
    vec = empirical_cylinders(rec, n, _alphabet(cfg))
    _write(out, "empirical.csv", vec.to_csv())


def cmd_distinguish(cfg, out):
    _require(cfg, "x", "y")
    kwargs = {}
    if cfg.get("tol") is not None:
        kwargs["tol"] = cfg["tol"]
    if cfg.get("depth") is not None:
        kwargs["n_max"] = _depth(cfg)
    verdict = distinguish(cfg["x"], cfg["y"], _mu(cfg), **kwargs)
    _write(out, "verdict.json", verdict.to_json() + "\n")
    print(verdict.relation)


HANDLERS = {
    "order": cmd_order,
    "forward": cmd_forward,
    "matrix": cmd_matrix,
    "reconstruct": cmd_reconstruct,
    "simulate": cmd_simulate,
    "estimate": cmd_estimate,
    "distinguish": cmd_distinguish,
}


def run(cfg):
    """Dispatch a validated config dict; returns the process exit status."""
    out = cfg.get("out", ".")
    try:
        HANDLERS[cfg["command"]](cfg, out)
    except (UsageError, KeyError, TypeError) as exc:
        log.error("invalid configuration: %s", exc)
        return EXIT_USAGE
    except SingularSystemError as exc:
        log.error("%s", exc)
        return EXIT_SINGULAR
    except InconclusiveDepthError as exc:
        log.error("%s", exc)
        return EXIT_INCONCLUSIVE
    except UnsupportedRegimeError as exc:
        log.error("%s", exc)
        return EXIT_REGIME
    except ContractError as exc:
        log.error("%s", exc)
        return EXIT_CONTRACT
    except SceneryError as exc:
        log.error("%s", exc)
        return EXIT_ERROR
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    try:
        cfg = load_config(args)
    except UsageError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
