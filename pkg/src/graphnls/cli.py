"""Command-line front end: ``graphnls <subcommand> [options]``.

Every run writes one JSON report (stdout unless ``--output``) holding the
tool version, the graph digest, the fully resolved configuration and the
result.  Exit status is 0 on success, 1 on invalid input and 2 on
numerical failure.
"""

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

import numpy as np

from . import __version__, _kernels
from .calculus import norm, project_mean_zero
from .corpus import FAMILIES, default_corpus, run_corpus
from .curvature import XI_TOL, all_local_forms, best_xi, verify_cd
from .errors import NumericalError, PreconditionError, ValidationError
from .graph import VertexSubsetProblem, load_function, load_graph
from .inequalities import (
    DEFAULT_STARTS,
    check_lambda_bound,
    check_theorem2,
    improvement_regime,
    norm_equivalence,
    tm_sup_estimate,
)
from .nls import Power, check_hypotheses, mountain_pass_solve, verify_solution
from .spectral import RESIDUAL_TOL, dirichlet_lambda1, rayleigh_quotient, spectrum

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _positive(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"must be a positive finite number, got {text!r}")
    return v


def _seed(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be in [0, 2^64), got {text!r}")
    return v


def _jsonable(obj):
    """Plain JSON types; non-finite floats become the strings 'inf', '-inf', 'nan'."""
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isfinite(x):
            return x
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return obj


# ----------------------------------------------------------- subcommands


def _cmd_spectrum(args, g):
    tol = args.tol if args.tol is not None else RESIDUAL_TOL
    args.tol = tol
    pairs = spectrum(g, tol=tol)
    rows = []
    for p in pairs:
        d = p.to_dict(g.vertices)
        # the edge-sum quotient double counts edges: it equals 2 lambda
        d["rayleigh_grad_sq"] = rayleigh_quotient(g, p.u, "grad_sq") if p.lam > 0 else 0.0
        rows.append(d)
    return {"eigenpairs": rows}, EXIT_OK


def _cmd_curvature(args, g):
    if args.m is None:
        raise PreconditionError("curvature needs --m")
    if (args.xi is None) == (not args.best_xi):
        raise PreconditionError("curvature needs exactly one of --xi or --best-xi")
    forms = all_local_forms(g)
    out = {}
    xi = args.xi
    if args.best_xi:
        args.tol = args.tol if args.tol is not None else XI_TOL
        xi = best_xi(g, args.m, tol=args.tol, forms=forms)
        out["best_xi"] = xi
    out["certificate"] = verify_cd(g, args.m, xi, forms=forms).to_dict()
    return out, EXIT_OK


def _resolve_xi(args, g):
    if args.m is None:
        raise PreconditionError(f"--ineq {args.ineq} needs --m")
    if args.xi is None:
        args.xi = best_xi(g, args.m)
        return args.xi, "best_xi"
    return args.xi, "given"


def _cmd_check(args, g):
    pairs = spectrum(g)[1:]
    if args.ineq == "norm-equiv":
        if args.alpha is None:
            raise PreconditionError("--ineq norm-equiv needs --alpha")
        c1, c2 = norm_equivalence(g, args.alpha, args.m, args.xi)
        out = {"alpha": args.alpha, "c1": c1, "c2": c2, "lambda1": pairs[0].lam}
        if args.function:
            u = project_mean_zero(g, load_function(g, args.function))
            a2 = norm(g, u, "alpha", alpha=args.alpha) ** 2
            w2 = norm(g, u, "sobolev", p=2.0) ** 2
            out["function"] = {"alpha_norm_sq": a2, "sobolev_norm_sq": w2,
                               "ratio": a2 / w2 if w2 > 0 else "nan", "projected_mean_zero": True}
        if args.m is not None and args.xi is not None and pairs[0].lam > args.xi:
            out["regime"] = improvement_regime(pairs[0].lam, args.m, args.xi)
        return out, EXIT_OK
    xi, source = _resolve_xi(args, g)
    reports = []
    for p in pairs:
        if args.ineq == "lambda-bound":
            r = check_lambda_bound(p.lam, args.m, xi)
        else:
            r = check_theorem2(g, p, args.m, xi, certify=False)
        reports.append(r.to_dict())
    out = {
        "m": args.m,
        "xi": xi,
        "xi_source": source,
        "cd_holds": verify_cd(g, args.m, xi).holds,
        "all_hold": all(r["holds"] for r in reports),
        "reports": reports,
    }
    if pairs[0].lam > xi:
        out["regime"] = improvement_regime(pairs[0].lam, args.m, xi)
    return out, EXIT_OK


def _cmd_tm(args, g):
    if args.beta is None or args.p is None:
        raise PreconditionError("tm needs --beta and --p")
    est = tm_sup_estimate(g, args.beta, args.p, starts=args.starts, seed=args.seed)
    return est.to_dict(g.vertices), EXIT_OK if est.converged else EXIT_NUMERIC


def _coefficient(g, spec):
    try:
        return float(spec)
    except ValueError:
        pass
    if not Path(spec).exists():
        raise PreconditionError(f"--coef is neither a number nor an existing file: {spec!r}")
    return load_function(g, spec)


def _cmd_solve(args, g):
    if args.alpha is None or args.q is None:
        raise PreconditionError("solve needs --alpha and --q")
    f = Power(args.q, _coefficient(g, args.coef), ar_q=args.ar_q)
    problem = None
    if args.mode == "dirichlet":
        if not args.interior:
            raise PreconditionError("--mode dirichlet needs --interior")
        labels = [s for chunk in args.interior for s in chunk.split(",") if s]
        problem = VertexSubsetProblem.from_labels(g, labels)
    elif args.interior:
        raise PreconditionError("--interior only applies to --mode dirichlet")
    convention = args.convention.replace("-", "_")
    args.tol = args.tol if args.tol is not None else 1e-10
    u0 = load_function(g, args.function) if args.function else None
    sol = mountain_pass_solve(
        g, args.alpha, f, problem, convention, u0=u0,
        n_points=args.n_points, max_steps=args.max_steps,
        tol=args.tol, grad_tol=args.grad_tol, seed=args.seed,
    )
    out = {
        "nonlinearity": f.to_dict(),
        "solution": sol.to_dict(g.vertices),
        "verification": verify_solution(g, sol, args.alpha, f, problem, convention),
    }
    if problem is not None:
        out["interior"] = problem.interior_labels()
        out["boundary"] = problem.boundary_labels()
        out["dirichlet_lambda1"] = dirichlet_lambda1(g, problem)
    if args.p is not None:
        out["hypotheses"] = check_hypotheses(f, args.p, n=g.n).to_dict()
    return out, EXIT_OK if sol.converged else EXIT_NUMERIC


def _cmd_corpus(args, g):
    fams = [s for s in args.families.split(",") if s]
    bad = [s for s in fams if s not in FAMILIES]
    if bad:
        raise PreconditionError(f"unknown corpus family {bad[0]!r}; choose from {list(FAMILIES)}")
    entries = default_corpus(fams, random_count=args.random_count, max_random_n=args.max_random_n,
                             seed=args.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        res = run_corpus(entries, seed=args.seed, jobs=args.jobs, m=args.m or 2.0, with_tm=args.with_tm)
    return res, EXIT_OK if res["all_passed"] else EXIT_NUMERIC


COMMANDS = {
    "spectrum": _cmd_spectrum,
    "curvature": _cmd_curvature,
    "check": _cmd_check,
    "tm": _cmd_tm,
    "solve": _cmd_solve,
    "corpus": _cmd_corpus,
}


# ---------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="report path (default stdout)")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--tol", type=_positive, default=None, help="main tolerance of the subcommand")

    with_graph = argparse.ArgumentParser(add_help=False, parents=[common])
    with_graph.add_argument("--graph", required=True, help=".json graph or plain 'x y w' edge list")

    p = _Parser(prog="graphnls", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"graphnls {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("spectrum", parents=[with_graph], help="eigenpairs of -Delta")

    s = sub.add_parser("curvature", parents=[with_graph], help="CD(m, xi) certificate")
    s.add_argument("--m", type=float)
    s.add_argument("--xi", type=float)
    s.add_argument("--best-xi", action="store_true")

    s = sub.add_parser("check", parents=[with_graph], help="eigenvalue and norm inequalities")
    s.add_argument("--ineq", required=True, choices=["lambda-bound", "theorem2", "norm-equiv"])
    s.add_argument("--m", type=float)
    s.add_argument("--xi", type=float, help="default: best_xi(g, m)")
    s.add_argument("--alpha", type=float)
    s.add_argument("--function", help="vertex-function JSON; norm-equiv reports its norms")

    s = sub.add_parser("tm", parents=[with_graph], help="Trudinger-Moser supremum estimate")
    s.add_argument("--beta", type=float)
    s.add_argument("--p", type=float)
    s.add_argument("--starts", type=int, default=DEFAULT_STARTS)

    s = sub.add_parser("solve", parents=[with_graph], help="mountain-pass solve of -k Delta u - alpha u = f(u)")
    s.add_argument("--alpha", type=float)
    s.add_argument("--family", choices=["power"], default="power")
    s.add_argument("--q", type=float)
    s.add_argument("--coef", default="1", help="constant or path to a vertex-function JSON")
    s.add_argument("--ar-q", type=float, default=None, help="exponent for the AR check (default q - 0.5)")
    s.add_argument("--p", type=float, default=None, help="also report hypotheses H1-H5 for this p")
    s.add_argument("--function", help="vertex-function JSON used as the path direction u0")
    s.add_argument("--mode", choices=["whole", "dirichlet"], default="whole")
    s.add_argument("--interior", action="append", help="interior labels, comma separated")
    s.add_argument("--convention", choices=["dirichlet-energy", "grad-sq"], default="dirichlet-energy")
    s.add_argument("--grad-tol", type=_positive, default=1e-8)
    s.add_argument("--n-points", type=int, default=40)
    s.add_argument("--max-steps", type=int, default=5000)

    s = sub.add_parser("corpus", parents=[common], help="invariant sweep over built-in graph families")
    s.add_argument("--families", default=",".join(FAMILIES), help="comma list; empty selects nothing")
    s.add_argument("--random-count", type=int, default=50)
    s.add_argument("--max-random-n", type=int, default=20)
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--m", type=float, default=2.0)
    s.add_argument("--with-tm", action="store_true")
    return p


def _emit(report, output):
    text = json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        g = load_graph(args.graph) if getattr(args, "graph", None) else None
    except (ValidationError, OSError) as exc:
        print(f"graphnls: error: {args.graph}: {exc}", file=sys.stderr)
        return EXIT_INPUT

    report = {"tool": "graphnls", "version": __version__, "backend": _kernels.BACKEND,
              "command": args.command}
    if g is not None:
        report["graph"] = {"sha256": g.digest, "n": g.n, "edges": len(g.edges)}
    code = EXIT_OK
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        try:
            result, code = COMMANDS[args.command](args, g)
            report["result"] = result
        except ValidationError as exc:
            print(f"graphnls: error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        except NumericalError as exc:
            report["result"] = None
            report["error"] = {"type": type(exc).__name__, "message": str(exc)}
            code = EXIT_NUMERIC
    report["warnings"] = sorted({str(w.message) for w in caught})
    report["config"] = {k: v for k, v in sorted(vars(args).items()) if k != "output"}
    _emit(report, args.output)
    if code == EXIT_NUMERIC:
        print("graphnls: numerical failure; see report", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
