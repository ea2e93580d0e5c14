"""Command-line front end: ``seed``, ``certify``, ``continue``, ``verify``, ``properties``.

Exit codes: 0 success, 1 usage or solver error (a JSON error object is
written to standard error), 2 mathematical refusal (degenerate seed,
failed verification or property check).
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import sweeps
from .config import build_field, load_config, parse_config, problem_digest
from .continuation import BranchPoint, continue_both
from .dde import periodicity_residual
from .errors import DelayOrbitError, MinDelayTooSmall
from .floquet import Verdict, cokernel_search, monodromy_report
from .fourier import PeriodicMap
from .orbit import find_seed_orbit
from .section import SectionProblem, index_diagnostic, residual
from .store import (
    BRANCH_SCHEMA,
    SEED_SCHEMA,
    ChecksumMismatch,
    branch_document,
    branch_from_document,
    read_document,
    seed_document,
    write_branch_csv,
    write_document,
)

__all__ = ["main", "build_parser"]

EXIT_OK, EXIT_ERROR, EXIT_REFUSED = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def g17(v):
    return "%.17g" % v


def _emit(args, payload, lines):
    if args.json:
        print(json.dumps(payload, sort_keys=True, indent=1, default=str))
    else:
        for line in lines:
            print(line)


def _outdir(args, config):
    path = args.out or config.output_dir
    os.makedirs(path, exist_ok=True)
    return path


def _need(args, name):
    if getattr(args, name) is None:
        raise UsageError(f"--{name.replace('_', '-')} is required for '{args.command}'")
    return getattr(args, name)


def _load_seed(args, config):
    doc = read_document(_need(args, "seed_file"), SEED_SCHEMA)
    if doc["problem_digest"] != problem_digest(config):
        raise UsageError("seed file was computed for a different problem")
    return doc, PeriodicMap.from_record(doc["x"])


def _multiplier_lines(report):
    out = []
    for m in report.multipliers:
        out.append(f"  multiplier {g17(m.real)} {g17(m.imag)}i  |mu|={g17(abs(m))}")
    return out


# -- commands -------------------------------------------------------------------

def cmd_seed(args, config):
    field = build_field(config)
    x0, report = find_seed_orbit(field, config.seed_guess, config.newton, config.K,
                                 config.floquet_steps, config.tol_nondeg)
    kernel = index_diagnostic(SectionProblem(field, config.K), 0.0, x0).as_dict()
    doc = seed_document(config, problem_digest(config), x0, report, kernel)
    path = os.path.join(_outdir(args, config), "seed.json")
    write_document(doc, path)
    payload = {"verdict": report.verdict.value, "seed_file": path,
               "multipliers": [[m.real, m.imag] for m in report.multipliers],
               "min_dist_to_one": report.min_dist_to_one}
    lines = [f"verdict {report.verdict.value}", *_multiplier_lines(report),
             f"min |mu - 1| = {g17(report.min_dist_to_one)}", f"wrote {path}"]
    _emit(args, payload, lines)
    return EXIT_OK if report.verdict is Verdict.NON_DEGENERATE else EXIT_REFUSED


def cmd_certify(args, config):
    field = build_field(config)
    if args.seed_file:
        _, x0 = _load_seed(args, config)
    else:
        x0, _ = find_seed_orbit(field, config.seed_guess, config.newton, config.K,
                                config.floquet_steps, config.tol_nondeg)
    report = monodromy_report(field, x0, config.floquet_steps, config.tol_nondeg)
    cands = cokernel_search(field, x0, config.floquet_steps, config.tol_nondeg,
                            rng=config.rng_seed)
    diag = index_diagnostic(SectionProblem(field, x0.K), 0.0, x0)
    degenerate = {
        "multiplier": report.min_dist_to_one <= config.tol_nondeg,
        "cokernel": any(c.pairing_defect <= 1e-6 for c in cands),
        "kernel": diag.kernel_dim_x_only >= 1,
    }
    agree = len(set(degenerate.values())) == 1
    payload = {
        "verdict": report.verdict.value,
        "min_dist_to_one": report.min_dist_to_one,
        "adjoint_defect": report.adjoint_defect,
        "two_route_defect": report.two_route_defect,
        "cokernel_candidates": [{"multiplier": [c.multiplier.real, c.multiplier.imag],
                                 "pairing_defect": c.pairing_defect,
                                 "periodicity_defect": c.periodicity_defect} for c in cands],
        "kernel": diag.as_dict(),
        "detectors_degenerate": degenerate,
        "detectors_agree": agree,
    }
    lines = [
        f"verdict {report.verdict.value}",
        *_multiplier_lines(report),
        f"min |mu - 1|          {g17(report.min_dist_to_one)}",
        f"adjoint defect        {g17(report.adjoint_defect)}",
        f"two-route defect      {g17(report.two_route_defect)}",
        f"cokernel candidates   {len(cands)}",
        *[f"  pairing defect      {g17(c.pairing_defect)}" for c in cands],
        f"kernel dim (x only)   {diag.kernel_dim_x_only}",
        f"kernel dim (bordered) {diag.kernel_dim_full}",
        f"detectors agree       {agree}",
    ]
    _emit(args, payload, lines)
    ok = report.verdict is Verdict.NON_DEGENERATE and agree
    return EXIT_OK if ok else EXIT_REFUSED


def _periodicity_table(field, branch, config):
    table = {}
    for i, pt in enumerate(branch.points):
        if pt.tau < config.verify_min_tau:
            continue
        try:
            table[i] = periodicity_residual(field, pt.x, pt.tau, config.verify_steps_per_unit)
        except MinDelayTooSmall:
            continue
    return table


def cmd_continue(args, config):
    doc, x0 = _load_seed(args, config)
    if doc["verdict"] != Verdict.NON_DEGENERATE.value:
        err = {"error": "DegenerateSeed", "message": f"seed verdict is {doc['verdict']}"}
        print(json.dumps(err), file=sys.stderr)
        return EXIT_REFUSED
    field = build_field(config)
    p = SectionProblem(field, config.K)
    seed = BranchPoint(0.0, x0)
    branch = continue_both(p, seed, config.tau_target_neg, config.tau_target_pos,
                           config.step, config.newton)
    digest = problem_digest(config)
    branch.problem_digest = digest
    out = _outdir(args, config)
    path = os.path.join(out, "branch.json")
    write_document(branch_document(config, digest, branch), path)
    csv_path = os.path.join(out, "branch.csv")
    mdist = doc["certificate"]["floquet"]["min_dist_to_one"]
    write_branch_csv(branch, csv_path, mdist, _periodicity_table(field, branch, config))
    lo, hi = branch.tau_range
    payload = {"tau_min": lo, "tau_max": hi, "points": len(branch),
               "termination_reason": branch.termination_reason,
               "termination": branch.details.get("termination"),
               "branch_file": path, "csv_file": csv_path}
    lines = [f"reached τ ∈ [{g17(lo)}, {g17(hi)}] with {len(branch)} points",
             f"termination {branch.termination_reason}", f"wrote {path}", f"wrote {csv_path}"]
    _emit(args, payload, lines)
    return EXIT_OK


def cmd_verify(args, config):
    path = _need(args, "branch")
    try:
        doc = read_document(path, BRANCH_SCHEMA)
    except ChecksumMismatch as exc:
        _emit(args, {"passed": False, "error": str(exc)}, [f"FAIL {exc}"])
        return EXIT_REFUSED
    stored = parse_config(doc["config"])
    config = config or stored
    if problem_digest(stored) != doc["problem_digest"]:
        _emit(args, {"passed": False, "error": "problem digest mismatch"},
              ["FAIL problem digest mismatch"])
        return EXIT_REFUSED
    field = build_field(stored)
    branch = branch_from_document(doc)
    p = SectionProblem(field, int(doc["K"]))
    rows, passed = [], True
    for pt in branch.points:
        sec = residual(p, pt.tau, pt.x).sobolev_norm(0)
        per = math.nan
        if pt.tau >= config.verify_min_tau:
            try:
                per = periodicity_residual(field, pt.x, pt.tau, config.verify_steps_per_unit)
            except MinDelayTooSmall:
                pass
        ok = sec <= 1e-8 and (math.isnan(per) or per <= config.verify_tolerance)
        passed &= ok
        rows.append({"tau": pt.tau, "section_residual": sec, "periodicity_residual": per,
                     "passed": ok})
    lines = [f"{'tau':>24} {'section residual':>24} {'periodicity residual':>24}  status"]
    lines += [f"{g17(r['tau']):>24} {g17(r['section_residual']):>24} "
              f"{g17(r['periodicity_residual']):>24}  {'ok' if r['passed'] else 'FAIL'}"
              for r in rows]
    checked = sum(not math.isnan(r["periodicity_residual"]) for r in rows)
    lines.append(f"{'PASS' if passed else 'FAIL'}: {len(rows)} points, "
                 f"{checked} checked by method of steps")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        write_branch_csv(branch, os.path.join(args.out, "verify.csv"),
                         periodicity={i: r["periodicity_residual"] for i, r in enumerate(rows)})
    _emit(args, {"passed": passed, "points": rows}, lines)
    return EXIT_OK if passed else EXIT_REFUSED


def cmd_properties(args, config):
    seed = config.rng_seed if config else 0
    results = sweeps.run_all(seed)
    lines = []
    for suite in results:
        for c in suite.checks:
            rel = "<=" if c.kind == "max" else ">="
            lines.append(f"{'PASS' if c.passed else 'FAIL'}  {suite.name:<14} {c.name}: "
                         f"{g17(c.value)} {rel} {g17(c.threshold)}")
    passed = all(s.passed for s in results)
    lines.append("all property suites passed" if passed else "some property checks failed")
    _emit(args, {"passed": passed, "suites": [s.as_dict() for s in results]}, lines)
    return EXIT_OK if passed else EXIT_REFUSED


COMMANDS = {
    "seed": cmd_seed,
    "certify": cmd_certify,
    "continue": cmd_continue,
    "verify": cmd_verify,
    "properties": cmd_properties,
}
NEEDS_CONFIG = {"seed", "certify", "continue"}


def build_parser():
    parser = _Parser(prog="delayorbits", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--config", help="run configuration (INI)")
    parser.add_argument("--out", help="output directory (overrides [output] dir)")
    parser.add_argument("--seed-file", dest="seed_file", help="seed document from 'seed'")
    parser.add_argument("--branch", help="branch document from 'continue'")
    parser.add_argument("--json", action="store_true", help="machine-readable report on stdout")
    return parser


def _fail(kind, message):
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return EXIT_ERROR


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        config = None
        if args.command in NEEDS_CONFIG:
            config = load_config(_need(args, "config"))
        elif args.config:
            config = load_config(args.config)
        return COMMANDS[args.command](args, config)
    except UsageError as exc:
        return _fail("UsageError", str(exc))
    except (DelayOrbitError, ValueError, OSError, np.linalg.LinAlgError) as exc:
        return _fail(type(exc).__name__, str(exc))


if __name__ == "__main__":
    sys.exit(main())
