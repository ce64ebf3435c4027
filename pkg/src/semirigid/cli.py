"""Command-line front end.

Subcommands analyze pairings, inspect kernels, work with commuting tuples,
construct stable points, sample the quadratic cone, verify the desk-scale
quotient consistency, and expose the model catalog.  Reports are JSON on
stdout; timing goes to stderr so identical inputs with identical seeds give
byte-identical reports.  Exit codes: 0 success, 1 failed verification suite,
2 malformed input, 3 violated precondition.

Pairing arguments accept a file path or a pseudo-path ``catalog:NAME:P1[:P2]``
expanding to the same JSON that ``catalog show`` prints.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from fractions import Fraction

import numpy as np

from . import __version__
from .catalog import catalog_build, catalog_names, catalog_notes, catalog_signature
from .commuting import (
    MatrixTuple,
    chevalley_separates,
    joint_spectrum,
    rep_analysis,
    trace_monomials,
)
from .exterior import kernel
from .scalars import PreconditionError, ScalarMode
from .serialize import (
    bivector_from_json,
    bivector_to_json,
    pairing_from_json,
    pairing_to_json,
    resolve_mode,
    scalar_to_json,
    tuple_from_json,
    tuple_to_json,
    verdict_to_json,
)
from .verdict import (
    SearchConfig,
    construct_stable_point,
    decide,
    mu_zero_sampler,
    split_component_dimension,
)

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_BAD_INPUT = 2
EXIT_PRECONDITION = 3


class _CliInputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _CliInputError(message)


def _canonical_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _digest(data: bytes) -> str:
    return "sha256:" + hashlib.sha256(data).hexdigest()


def _load_pairing(source: str):
    """Load a pairing from a file or a catalog:NAME:PARAMS pseudo-path."""
    if source.startswith("catalog:"):
        parts = source.split(":")
        entry = catalog_build(parts[1], parts[2:])
        text = _canonical_json(pairing_to_json(entry.pairing))
        return entry.pairing, _digest(text.encode())
    try:
        with open(source, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise _CliInputError(f"cannot read pairing file: {exc}") from exc
    pairing, _ = pairing_from_json(json.loads(raw))
    return pairing, _digest(raw)


def _load_tuple(path: str):
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise _CliInputError(f"cannot read tuple file: {exc}") from exc
    return tuple_from_json(json.loads(raw)), _digest(raw)


def _resolve_seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("SEMIRIGID_SEED")
    if env is not None:
        return int(env)
    return 0


def _search_config(args, seed: int) -> SearchConfig:
    return SearchConfig(
        restarts=getattr(args, "restarts", None) or 64,
        max_iterations=getattr(args, "max_iterations", None) or 200,
        seed=seed,
        tol_plucker=getattr(args, "tol_plucker", None) or 1e-18,
        tol_rank=getattr(args, "tol_rank", None) or 1e-8,
    )


def _emit(report: dict, started: float) -> int:
    sys.stdout.write(_canonical_json(report) + "\n")
    sys.stderr.write(json.dumps({"timing_ms": round(1000 * (time.monotonic() - started), 3)})
                     + "\n")
    return EXIT_OK


def _parse_epsilon(text: str):
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    value = float(text)
    return value


# ---------------------------------------------------------------------------
# subcommand handlers


def _cmd_analyze(args, started):
    pairing, digest = _load_pairing(args.pairing)
    mode = resolve_mode(pairing, args.mode)
    seed = _resolve_seed(args)
    cfg = _search_config(args, seed)
    verdict = decide(pairing, mode, cfg)
    report = {
        "tool_version": __version__,
        "input_digest": digest,
        "seed": seed,
        "verdict": verdict_to_json(verdict),
    }
    return _emit(report, started)


def _cmd_kernel(args, started):
    pairing, digest = _load_pairing(args.pairing)
    mode = resolve_mode(pairing, args.mode)
    k = kernel(pairing, mode)
    report = {
        "tool_version": __version__,
        "input_digest": digest,
        "seed": _resolve_seed(args),
        "kernel": {
            "dim_v": k.dim_v,
            "dim": k.dim,
            "basis": [bivector_to_json(b) for b in k.basis],
        },
    }
    return _emit(report, started)


def _tuple_mode(alpha: MatrixTuple, requested):
    if requested == "rational" and not alpha.is_rational():
        raise _CliInputError("cannot analyze complex data in rational mode")
    if requested is None:
        requested = "rational" if alpha.is_rational() else "complex"
    return ScalarMode.exact() if requested == "rational" else ScalarMode.floating()


def _cmd_commuting(args, started):
    alpha, digest = _load_tuple(args.tuple)
    mode = _tuple_mode(alpha, args.mode)
    seed = _resolve_seed(args)
    if args.commuting_cmd == "spectrum":
        spectrum = joint_spectrum(alpha, mode)
        kind = "rational" if spectrum.is_rational() else "complex"
        pts = sorted(
            ([scalar_to_json(x, kind) for x in p] for p in spectrum.points),
            key=lambda p: json.dumps(p))
        payload = {"n": alpha.n, "d": alpha.d, "scalar": kind, "points": pts}
        key = "spectrum"
    elif args.commuting_cmd == "invariants":
        monos = trace_monomials(alpha, args.max_degree)
        kind = "rational" if alpha.is_rational() else "complex"
        payload = {
            "max_degree": args.max_degree,
            "monomials": [
                {"word": list(w), "value": scalar_to_json(v, kind)}
                for w, v in sorted(monos.items(), key=lambda kv: (len(kv[0]), kv[0]))
            ],
        }
        key = "invariants"
    else:
        out = rep_analysis(alpha, mode)
        payload = {
            "commutant_dim": out.commutant_dim,
            "algebra_dim": out.algebra_dim,
            "radical_dim": out.radical_dim,
            "irreducible": out.irreducible,
            "semisimple": out.semisimple,
            "stable": out.stable,
        }
        key = "analysis"
    report = {"tool_version": __version__, "input_digest": digest,
              "seed": seed, key: payload}
    return _emit(report, started)


def _cmd_construct(args, started):
    pairing, digest = _load_pairing(args.pairing)
    seed = _resolve_seed(args)
    if args.auto:
        cfg = _search_config(args, seed)
        verdict = decide(pairing, resolve_mode(pairing, args.mode), cfg)
        if verdict.witness is None:
            raise _CliInputError(
                f"no witness available: verdict is {verdict.status} "
                f"({verdict.certificate})")
        omega = verdict.witness
    else:
        with open(args.witness, "rb") as fh:
            omega = bivector_from_json(json.loads(fh.read()))
    alpha = construct_stable_point(pairing, omega, args.n, _parse_epsilon(args.epsilon))
    report = {
        "tool_version": __version__,
        "input_digest": digest,
        "seed": seed,
        "witness": bivector_to_json(omega),
        "tuple": tuple_to_json(alpha),
    }
    return _emit(report, started)


def _cmd_sample(args, started):
    pairing, digest = _load_pairing(args.pairing)
    seed = _resolve_seed(args)
    cfg = SearchConfig(restarts=args.starts, max_iterations=200, seed=seed)
    out = mu_zero_sampler(pairing, args.n, cfg)
    report = {
        "tool_version": __version__,
        "input_digest": digest,
        "seed": seed,
        "samples": {
            "attempted": out.attempted,
            "converged": out.converged,
            "points": [
                {
                    "matrices": tuple_to_json(s.alpha)["matrices"],
                    "commuting": s.commuting,
                    "mu_residual": s.mu_residual,
                    "chi_residual": s.chi_residual,
                }
                for s in out.samples
            ],
        },
    }
    return _emit(report, started)


def _cmd_verify_chevalley(args, started):
    seed = _resolve_seed(args)
    rng = np.random.default_rng(seed)
    mode = ScalarMode.floating()
    n, d = args.n, args.d
    failures = {"power_sums": 0, "conjugation": 0, "perturbation": 0}
    for _ in range(args.samples):
        diags = [np.diag(rng.integers(-4, 5, size=n).astype(complex)) for _ in range(d)]
        p = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) + 3 * np.eye(n)
        pinv = np.linalg.inv(p)
        alpha = MatrixTuple.from_matrices([p @ dg @ pinv for dg in diags])
        points = [tuple(dg[j, j] for dg in diags) for j in range(n)]
        monos = trace_monomials(alpha, min(4, max(n, 2)))
        for word, val in monos.items():
            expected = sum(np.prod([pt[i - 1] for i in word]) for pt in points)
            if abs(val - expected) > 1e-8 * max(1.0, abs(expected)):
                failures["power_sums"] += 1
                break
        q = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) + 3 * np.eye(n)
        conj = MatrixTuple.from_matrices(
            [q @ np.asarray(m, complex) @ np.linalg.inv(q) for m in alpha.matrices])
        if not chevalley_separates(alpha, conj, mode):
            failures["conjugation"] += 1
        shifted = [dg.copy() for dg in diags]
        shifted[0][0, 0] += 1e-3
        beta = MatrixTuple.from_matrices([p @ dg @ pinv for dg in shifted])
        if chevalley_separates(alpha, beta, mode):
            failures["perturbation"] += 1
    passed = not any(failures.values())
    report = {
        "tool_version": __version__,
        "input_digest": _digest(f"chevalley:{n}:{d}:{args.samples}".encode()),
        "seed": seed,
        "chevalley": {"n": n, "d": d, "samples": args.samples,
                      "passed": passed, "failures": failures},
    }
    code = _emit(report, started)
    return code if passed else EXIT_FAILED_CHECK


def _cmd_catalog(args, started):
    seed = _resolve_seed(args)
    if args.catalog_cmd == "list":
        payload = [
            {"name": name, "params": catalog_signature(name), "notes": catalog_notes(name)}
            for name in catalog_names()
        ]
        report = {"tool_version": __version__,
                  "input_digest": _digest(b"catalog:list"),
                  "seed": seed, "catalog": payload}
        return _emit(report, started)
    entry = catalog_build(args.name, args.params)
    pairing_json = pairing_to_json(entry.pairing)
    report = {
        "tool_version": __version__,
        "input_digest": _digest(_canonical_json(pairing_json).encode()),
        "seed": seed,
        "entry": {
            "name": entry.name,
            "params": list(entry.params),
            "expected_status": entry.expected_status,
            "notes": entry.notes,
            "pairing": pairing_json,
        },
    }
    return _emit(report, started)


def _cmd_split_dim(args, started):
    value = split_component_dimension(args.n, args.dim_m)
    report = {
        "tool_version": __version__,
        "input_digest": _digest(f"split-dim:{args.n}:{args.dim_m}".encode()),
        "seed": _resolve_seed(args),
        "split_component_dimension": value,
    }
    return _emit(report, started)


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="semirigid",
                     description="semi-rigidity analysis of skew pairings")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_seed(p):
        p.add_argument("--seed", type=int, default=None)

    p = sub.add_parser("analyze", help="decide semi-rigidity of a pairing")
    p.add_argument("--pairing", required=True)
    p.add_argument("--mode", choices=["rational", "complex"], default=None)
    p.add_argument("--restarts", type=int, default=None)
    p.add_argument("--max-iterations", dest="max_iterations", type=int, default=None)
    p.add_argument("--tol-plucker", dest="tol_plucker", type=float, default=None)
    p.add_argument("--tol-rank", dest="tol_rank", type=float, default=None)
    add_seed(p)
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("kernel", help="kernel basis of a pairing")
    p.add_argument("--pairing", required=True)
    p.add_argument("--mode", choices=["rational", "complex"], default=None)
    add_seed(p)
    p.set_defaults(func=_cmd_kernel)

    p = sub.add_parser("commuting", help="commuting-tuple operations")
    csub = p.add_subparsers(dest="commuting_cmd", required=True)
    for name in ("spectrum", "invariants", "analyze"):
        cp = csub.add_parser(name)
        cp.add_argument("--tuple", required=True)
        cp.add_argument("--mode", choices=["rational", "complex"], default=None)
        if name == "invariants":
            cp.add_argument("--max-degree", dest="max_degree", type=int, default=4)
        add_seed(cp)
        cp.set_defaults(func=_cmd_commuting)

    p = sub.add_parser("construct", help="constructions from witnesses")
    csub = p.add_subparsers(dest="construct_cmd", required=True)
    cp = csub.add_parser("stable")
    cp.add_argument("--pairing", required=True)
    group = cp.add_mutually_exclusive_group(required=True)
    group.add_argument("--witness")
    group.add_argument("--auto", action="store_true")
    cp.add_argument("--n", type=int, required=True)
    cp.add_argument("--epsilon", default="1")
    cp.add_argument("--mode", choices=["rational", "complex"], default=None)
    cp.add_argument("--restarts", type=int, default=None)
    add_seed(cp)
    cp.set_defaults(func=_cmd_construct)

    p = sub.add_parser("sample", help="sample the quadratic cone")
    ssub = p.add_subparsers(dest="sample_cmd", required=True)
    sp = ssub.add_parser("mu-zero")
    sp.add_argument("--pairing", required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--starts", type=int, default=64)
    add_seed(sp)
    sp.set_defaults(func=_cmd_sample)

    p = sub.add_parser("verify", help="verification suites")
    vsub = p.add_subparsers(dest="verify_cmd", required=True)
    vp = vsub.add_parser("chevalley")
    vp.add_argument("--n", type=int, required=True)
    vp.add_argument("--d", type=int, required=True)
    vp.add_argument("--samples", type=int, default=50)
    add_seed(vp)
    vp.set_defaults(func=_cmd_verify_chevalley)

    p = sub.add_parser("catalog", help="model pairings")
    ksub = p.add_subparsers(dest="catalog_cmd", required=True)
    kp = ksub.add_parser("list")
    add_seed(kp)
    kp.set_defaults(func=_cmd_catalog)
    kp = ksub.add_parser("show")
    kp.add_argument("name")
    kp.add_argument("params", nargs="*", type=int)
    add_seed(kp)
    kp.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("split-dim", help="dimension of the split component")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--dim-m", dest="dim_m", type=int, required=True)
    add_seed(p)
    p.set_defaults(func=_cmd_split_dim)

    return parser


def _error_json(exc: Exception) -> str:
    return json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}})


def main(argv=None) -> int:
    started = time.monotonic()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args, started)
    except PreconditionError as exc:
        sys.stderr.write(_error_json(exc) + "\n")
        return EXIT_PRECONDITION
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(_error_json(exc) + "\n")
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
