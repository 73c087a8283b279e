"""Command-line interface.

Every subcommand prints one JSON certificate on standard output.  Exit codes:
0 YES, 1 NO (with witness), 2 UNKNOWN, 64 usage error, 65 input format error.
"""

from __future__ import annotations

import argparse
import json
import sys


from . import __version__
from . import catalog
from . import linalg as la
from .certificates import Certificate, Method, Verdict
from .errors import FramecertError, NotAViolation, TooLarge, UnknownExample
from .falsifier import SearchConfig, nr_violation_search, pr_witness_from_partition
from .formats import certificate_file, dumps, load_json, parse_frame, parse_subspaces, verify_certificate
from .frames import canonical_parseval, frame_report
from .naimark import gram_defect, naimark_complement, naimark_pr_bounds_check, verify_naimark_pair
from .operators import abc_equivalence_suite
from .spark import complement_property, smallest_dependent_subset, yields_phase_retrieval_vectors
from .subspaces import norm_retrieval_certificate, pop_family_checks, sample_pop_family

EXIT = {Verdict.YES: 0, Verdict.NO: 1, Verdict.UNKNOWN: 2}
EX_USAGE = 64
EX_DATAERR = 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EX_USAGE)


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--tol", type=float, default=la.DEFAULT_TOL.witness_tol, help="witness tolerance")
    p.add_argument("--rank-tol", type=float, default=la.DEFAULT_TOL.rank_rel_tol, help="relative rank threshold (float mode)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-m", type=int, default=24, help="largest frame size for subset enumeration")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", dest="field", action="store_const", const=la.EXACT, help="force exact rational arithmetic")
    mode.add_argument("--float", dest="field", action="store_const", const=la.FLOAT, help="force floating point")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="framecert", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def frame_cmd(name, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.add_argument("input", help="frame JSON file")
        return p

    def family_cmd(name, help):
        p = sub.add_parser(name, parents=[common], help=help)
        p.add_argument("input", help="subspace family JSON file")
        return p

    frame_cmd("report", "frame bounds, tightness and Parseval test")
    frame_cmd("spark", "size of the smallest dependent subset")
    frame_cmd("cp", "complement property")
    frame_cmd("pr-vectors", "phase retrieval by the frame vectors")
    p = frame_cmd("naimark", "Naimark complement of a Parseval frame")
    p.add_argument("--canonical", action="store_true", help="replace the frame by its canonical Parseval frame first")
    p.add_argument("--bounds", action="store_true", help="also check the phase-retrieval count bounds on both sides")
    family_cmd("nr-cert", "norm retrieval certificate for a subspace family")
    p = family_cmd("nr-falsify", "search for a norm-retrieval counterexample")
    p.add_argument("--restarts", type=int, default=SearchConfig.restarts)
    p.add_argument("--max-iters", type=int, default=SearchConfig.max_iters)
    p.add_argument("--delta", type=float, default=SearchConfig.delta)
    p.add_argument("--search-only", action="store_true", help="skip the exact decision procedures")
    p = frame_cmd("pr-falsify", "phase-retrieval counterexample from a partition")
    p.add_argument("--subset", help="comma-separated 0-based indices of one side of the partition")
    p = frame_cmd("abc-suite", "phase retrieval under random invertible transforms")
    p.add_argument("--trials", type=int, default=50)
    p = sub.add_parser("pop-family", parents=[common], help="generic rank-one family with I in the span")
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=6)
    p = sub.add_parser("example", parents=[common], help="run a named example")
    p.add_argument("name", choices=sorted(catalog.EXAMPLES))
    p = sub.add_parser("verify", parents=[common], help="re-check a certificate's witness")
    p.add_argument("certificate", help="certificate JSON file")
    p.add_argument("input", help="the frame or family the certificate was issued for")
    return parser


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _frame(args):
    obj, data = load_json(args.input)
    return parse_frame(obj, args.field), data


def _family(args):
    obj, data = load_json(args.input)
    return parse_subspaces(obj, args.field), data


def cmd_report(args, tol):
    f, data = _frame(args)
    rep = frame_report(f, tol)
    witness = {
        "lower_bound": rep.lower_bound,
        "upper_bound": rep.upper_bound,
        "is_frame": rep.is_frame,
        "is_tight": rep.is_tight,
        "is_parseval": rep.is_parseval,
    }
    if rep.is_frame:
        return Certificate(Verdict.YES, Method.FRAME_BOUNDS, witness, f.field), data
    kernel = la.null_space_basis(f.vectors, tol)[:, 0]
    return Certificate(Verdict.NO, Method.FRAME_BOUNDS, {**witness, "kernel_vector": kernel}, f.field), data


def cmd_spark(args, tol):
    f, data = _frame(args)
    k, subset = smallest_dependent_subset(f, tol, args.max_m)
    witness = {"spark": k, "dependent_subset": subset}
    if f.size >= f.dim:
        witness["full_spark"] = k == f.dim + 1
    return Certificate(Verdict.YES, Method.SUBSET_ENUMERATION, witness, f.field), data


def cmd_cp(args, tol):
    f, data = _frame(args)
    return complement_property(f, tol, args.max_m), data


def cmd_pr_vectors(args, tol):
    f, data = _frame(args)
    return yields_phase_retrieval_vectors(f, tol, args.max_m), data


def cmd_naimark(args, tol):
    f, data = _frame(args)
    if args.canonical:
        f = canonical_parseval(f, tol)
    pair = naimark_complement(f, tol)
    ok = verify_naimark_pair(pair, tol)
    witness = {"complement": pair.complement, "gram_defect": gram_defect(pair)}
    if args.bounds:
        witness["count_bounds"] = naimark_pr_bounds_check(f, tol, args.max_m)
    verdict = Verdict.YES if ok else Verdict.UNKNOWN
    return Certificate(verdict, Method.GRAM_COMPLEMENT, witness, la.FLOAT), data


def cmd_nr_cert(args, tol):
    fam, data = _family(args)
    return norm_retrieval_certificate(fam, tol), data


def cmd_nr_falsify(args, tol):
    fam, data = _family(args)
    if not args.search_only:
        cert = norm_retrieval_certificate(fam, tol)
        if cert.verdict is not Verdict.UNKNOWN:
            return cert, data
    cfg = SearchConfig(restarts=args.restarts, max_iters=args.max_iters, delta=args.delta, seed=args.seed)
    pair = nr_violation_search(fam, cfg)
    search = {"restarts": cfg.restarts, "max_iters": cfg.max_iters, "delta": cfg.delta, "seed": cfg.seed}
    if pair is None:
        return Certificate(Verdict.UNKNOWN, Method.SEARCH_EXHAUSTED, {"search": search}, la.FLOAT), data
    return Certificate(Verdict.NO, Method.OPTIMIZATION_SEARCH, {"pair": pair, "search": search}, la.FLOAT), data


def cmd_pr_falsify(args, tol):
    f, data = _frame(args)
    if args.subset is None:
        return yields_phase_retrieval_vectors(f, tol, args.max_m), data
    try:
        subset = sorted({int(s) for s in args.subset.split(",") if s.strip()})
    except ValueError:
        raise UsageError(f"--subset must be comma-separated integers, got {args.subset!r}") from None
    if any(i < 0 or i >= f.size for i in subset):
        raise UsageError(f"--subset indices must lie in [0, {f.size - 1}]")
    try:
        pair = pr_witness_from_partition(f, subset, tol)
    except NotAViolation as exc:
        witness = {"subset": subset, "reason": str(exc)}
        return Certificate(Verdict.UNKNOWN, Method.COMPLEMENT_PROPERTY, witness, f.field), data
    rest = [i for i in range(f.size) if i not in subset]
    witness = {"subset": subset, "complement": rest, "pair": pair}
    return Certificate(Verdict.NO, Method.COMPLEMENT_PROPERTY, witness, f.field), data


def cmd_abc_suite(args, tol):
    f, data = _frame(args)
    rep = abc_equivalence_suite(f, args.trials, args.seed, tol, args.max_m)
    witness = {
        "ground_truth": rep.ground_truth,
        "trials": args.trials,
        "trial_verdicts": rep.trial_verdicts,
        "all_match": rep.all_match,
    }
    if rep.operator is not None:
        witness.update(operator=rep.operator, pair=rep.pair, construction=rep.construction)
    verdict = rep.ground_truth.verdict if rep.all_match else Verdict.UNKNOWN
    return Certificate(verdict, Method.INVERTIBLE_TRANSFORM_SUITE, witness, f.field), data


def _args_bytes(args, keys) -> bytes:
    return json.dumps({k: getattr(args, k) for k in keys}, sort_keys=True).encode()


def cmd_pop_family(args, tol):
    pop = sample_pop_family(args.n, args.m, args.seed, tol)
    checks = pop_family_checks(pop, tol)
    ok = checks["identity_residual"] <= tol.witness_tol and checks["coefficients_positive"] and checks["proper_subfamilies_exclude_identity"]
    witness = {
        "frame": pop.frame,
        "coefficients": pop.coefficients,
        "projected_vectors": [w.basis[:, 0] for w in pop.family.members],
        "checks": checks,
    }
    verdict = Verdict.YES if ok else Verdict.UNKNOWN
    return Certificate(verdict, Method.IDENTITY_IN_SPAN, witness, la.EXACT), _args_bytes(args, ("command", "n", "m", "seed"))


def cmd_example(args, tol):
    return catalog.example(args.name, args.seed, tol), _args_bytes(args, ("command", "name", "seed"))


def cmd_verify(args, tol):
    cert, _ = load_json(args.certificate)
    obj, data = load_json(args.input)
    if not isinstance(cert, dict):
        raise UsageError("certificate must be a JSON object")
    ok, reason = verify_certificate(cert, obj, tol)
    return {"verified": ok, "reason": reason, "verdict": cert.get("verdict"), "method": cert.get("method")}, data


COMMANDS = {
    "report": cmd_report,
    "spark": cmd_spark,
    "cp": cmd_cp,
    "pr-vectors": cmd_pr_vectors,
    "naimark": cmd_naimark,
    "nr-cert": cmd_nr_cert,
    "nr-falsify": cmd_nr_falsify,
    "pr-falsify": cmd_pr_falsify,
    "abc-suite": cmd_abc_suite,
    "pop-family": cmd_pop_family,
    "example": cmd_example,
    "verify": cmd_verify,
}


def _fail(code: int, message: str) -> int:
    sys.stderr.write(f"framecert: {message}\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        tol = la.ToleranceConfig(rank_rel_tol=args.rank_tol, witness_tol=args.tol)
    except ValueError as exc:
        return _fail(EX_USAGE, str(exc))
    if args.max_m < 1:
        return _fail(EX_USAGE, "--max-m must be positive")
    try:
        result, data = COMMANDS[args.command](args, tol)
    except (UsageError, TooLarge, UnknownExample) as exc:
        return _fail(EX_USAGE, str(exc))
    except FramecertError as exc:
        return _fail(EX_DATAERR, f"{type(exc).__name__}: {exc}")
    except ValueError as exc:
        return _fail(EX_USAGE, str(exc))
    if args.command == "verify":
        sys.stdout.write(dumps(result))
        sys.stdout.flush()
        return {True: 0, False: 1, None: 2}[result["verified"]]
    sys.stdout.write(dumps(certificate_file(result, data)))
    sys.stdout.flush()
    return EXIT[result.verdict]


if __name__ == "__main__":
    raise SystemExit(main())
