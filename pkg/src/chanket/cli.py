"""Command-line front end.

    chanket analyze --standard bit_flip --p 0.1
    chanket analyze channel.json --format text
    chanket code-audit --builtin five_qubit
    chanket code-audit code.json --errors bitflip
    chanket verify theorems --seed 7

Exit codes: 0 success, 1 a verdict or suite failed, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import __version__
from .channel import STANDARD_KINDS, ChannelBundle, bundle_to_json, channel_from_spec, pauli_correlators, standard_channel
from .codes import (
    CodeSpec,
    builtin_code,
    error_set,
    knill_laflamme,
    security,
    singleton_check,
    singleton_is_tight,
)
from .config import TOL
from .infoloc import all_info_present, cq_structure
from .opbasis import pauli_expand
from .suites import GROUPS, run_group

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _emit(report: dict, fmt: str, text: str):
    if fmt == "json":
        sys.stdout.write(json.dumps(report, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(text)


def _fmt_terms(terms: dict) -> str:
    out = ""
    for k, v in sorted(terms.items()):
        sign = "-" if v < 0 else "+"
        out += f"{sign} {abs(v):.6g} {k} " if out else f"{v:.6g} {k} "
    return out.strip()


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _channel(args) -> ChannelBundle:
    if args.standard:
        if args.spec:
            raise UsageError("give either a spec file or --standard, not both")
        if args.p is None:
            raise UsageError("--standard needs --p")
        return standard_channel(args.standard, args.p, args.tol)
    if not args.spec:
        raise UsageError("analyze needs a channel spec file or --standard")
    return channel_from_spec(_load_json(args.spec), args.tol)


def cmd_analyze(args) -> int:
    bundle = _channel(args)
    q_coeffs = pauli_expand(bundle.transition, args.tol)
    r_coeffs = pauli_expand(bundle.dynamical, args.tol)
    allp = all_info_present(bundle, bundle.entrance, bundle.exit, tol=args.tol)
    cq = cq_structure(bundle.dynamical, bundle.entrance, args.tol)
    invariants = bundle.invariant_residuals()
    report = {
        "seed": args.seed,
        "tol": args.tol,
        "representations": bundle_to_json(bundle),
        "transition_pauli": q_coeffs.to_json(),
        "transition_terms": q_coeffs.nonzero_terms(args.tol),
        "dynamical_pauli": r_coeffs.to_json(),
        "dynamical_terms": r_coeffs.nonzero_terms(args.tol),
        "kraus_rank": bundle.kraus_rank,
        "invariants": invariants,
        "verdicts": {
            "all_info_present": allp.to_json(),
            "cq": {
                "is_cq": cq.is_cq,
                "commutator_residual": cq.commutator_residual,
                "reassembly_residual": None if np.isnan(cq.reassembly_residual) else cq.reassembly_residual,
            },
        },
    }
    if bundle.transition.registry.dims == (2, 2):
        report["correlators"] = dict(zip(("xx", "yy", "zz"), pauli_correlators(bundle)))
    scale = bundle.transition.registry.total
    text = (
        f"Kraus rank      {bundle.kraus_rank}\n"
        f"{scale}Q  = {_fmt_terms(q_coeffs.nonzero_terms(args.tol))}\n"
        f"{scale}R  = {_fmt_terms(r_coeffs.nonzero_terms(args.tol))}\n"
        f"all info a->b   {allp.verdict} (residual {allp.residual:.3g})\n"
        f"CQ channel      {cq.is_cq}\n"
        f"invariants      max residual {max(invariants.values()):.3g}\n"
    )
    _emit(report, args.format, text)
    return EXIT_OK if max(invariants.values()) <= args.tol else EXIT_FAIL


# ---------------------------------------------------------------------------
# code-audit
# ---------------------------------------------------------------------------


def _code(args) -> CodeSpec:
    if args.builtin:
        if args.spec:
            raise UsageError("give either a code spec file or --builtin, not both")
        return builtin_code(args.builtin)
    if not args.spec:
        raise UsageError("code-audit needs a code spec file or --builtin")
    try:
        return CodeSpec.from_json(_load_json(args.spec))
    except (KeyError, TypeError, IndexError) as exc:
        raise UsageError(f"malformed code spec: {exc!r}") from exc


def cmd_code_audit(args) -> int:
    code = _code(args)
    if code.n > 8:
        print(f"warning: security search over {code.n} carriers is exponential", file=sys.stderr)
    sec = security(code, args.max_check, args.tol, args.jobs)
    ops, names = error_set(code, args.errors)
    kl = knill_laflamme(code, ops, args.tol, names)
    t = sec.s // 2
    dims = set(code.carrier_dims)
    singleton = None
    if len(dims) == 1:
        d = dims.pop()
        singleton = {
            "n": code.n, "t": t, "K": code.K, "D": d,
            "holds": singleton_check(code.n, t, code.K, d),
            "tight": singleton_is_tight(code.n, t, code.K, d),
        }
    report = {
        "seed": args.seed,
        "tol": args.tol,
        "code": {"name": code.name, "n": code.n, "K": code.K, "carrier_dims": list(code.carrier_dims)},
        "security": sec.to_json(),
        "knill_laflamme": {"error_set": args.errors, **kl.to_json()},
        "singleton": singleton,
    }
    lines = [
        f"code            {code.name} (n={code.n}, K={code.K})",
        f"security s      {sec.s}{' (lower bound)' if sec.capped else ''}",
    ]
    if sec.witness is not None:
        w = sec.witness
        lines.append(f"witness         {w['operator_name']} on carriers {','.join(w['carriers'])}"
                     f" (residual {w['residual']:.3g})")
    lines.append(f"Knill-Laflamme  {'pass' if kl.passes else 'fail'} for {args.errors} ({len(ops)} errors)")
    if singleton is not None:
        lines.append(f"Singleton       n={code.n} t={t} K={code.K} D={singleton['D']}: "
                     f"{'holds' if singleton['holds'] else 'violated'}"
                     f"{' with equality' if singleton['tight'] else ''}")
    _emit(report, args.format, "\n".join(lines) + "\n")
    ok = kl.passes and (singleton is None or singleton["holds"])
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    groups = sorted(GROUPS) if args.suite == "all" else [args.suite]
    results = [r for g in groups for r in run_group(g, args.seed, args.n, args.tol)]
    report = {"seed": args.seed, "tol": args.tol, "suites": [r.to_json() for r in results]}
    text = "".join(
        f"{'PASS' if r.passed else 'FAIL'}  {r.name:<22} {r.instances:>5} instances  "
        f"max residual {r.max_residual:.3g}\n"
        for r in results
    )
    _emit(report, args.format, text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=TOL, help="numerical tolerance (default %(default)g)")
    common.add_argument("--seed", type=int, default=0, help="random seed (default %(default)s)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for subset checks")

    parser = argparse.ArgumentParser(prog="chanket", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="all representations and verdicts for one channel")
    p.add_argument("spec", nargs="?", help="channel spec JSON file")
    p.add_argument("--standard", choices=STANDARD_KINDS)
    p.add_argument("--p", type=float, help="error probability for --standard")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("code-audit", parents=[common], help="security, Knill-Laflamme and Singleton checks")
    p.add_argument("spec", nargs="?", help="code spec JSON file")
    p.add_argument("--builtin", choices=("repetition3", "five_qubit"))
    p.add_argument("--errors", choices=("pauli1", "bitflip", "phaseflip"), default="pauli1")
    p.add_argument("--max-check", type=int, default=None, help="largest subset size to test")
    p.set_defaults(func=cmd_code_audit)

    p = sub.add_parser("verify", parents=[common], help="run seeded property suites")
    p.add_argument("suite", choices=sorted(GROUPS) + ["all"])
    p.add_argument("-n", type=int, default=None, help="instances per suite")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1:
        parser.error("--jobs must be at least 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"chanket: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, KeyError) as exc:
        print(f"chanket: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
