"""
Batch command line for the Gauss hypergeometric kernels.

Every verb writes its result to standard output (csv rows or a JSON
envelope) and fails closed with a JSON error envelope on standard error.

Exit codes: 0 success, 1 numerical failure, 2 validation failure,
64 usage error, 65 malformed input file.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Callable, Sequence
from pathlib import Path
from typing import Any, NoReturn, TextIO

import numpy as np

from . import __version__, multivariate, oracles, univariate
from .contracts import (
    BivariateVariant,
    FloatArray,
    KernelError,
    KernelParams,
    LimitFamily,
    LimitKernelSpec,
    MultivarParams,
    ParamSpaceError,
    ReasonCode,
    ValidationError,
    canonical_sha256,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NUMERIC = 1
EXIT_VALIDATION = 2
EXIT_USAGE = 64
EXIT_DATAERR = 65

_NUMERIC_CODES = {
    ReasonCode.GHK_ERROR_POLE,
    ReasonCode.GHK_ERROR_DOMAIN,
    ReasonCode.GHK_ERROR_NON_CONVERGENCE,
    ReasonCode.GHK_ERROR_QUADRATURE,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        raise UsageError(message)


def _fmt(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.15g}"
    return str(v)


def parse_grid(spec: str) -> FloatArray:
    """A single number or an inclusive ``start:stop:count`` grid."""
    parts = spec.split(":")
    try:
        if len(parts) == 1:
            return np.array([float(parts[0])])
        if len(parts) == 3:
            count = int(parts[2])
            if count < 1:
                raise ValueError(count)
            return np.linspace(float(parts[0]), float(parts[1]), count)
    except ValueError as exc:
        raise UsageError(f"bad grid spec {spec!r}") from exc
    raise UsageError(f"bad grid spec {spec!r}; expected a number or start:stop:count")


def _read_capped(path: str) -> str:
    p = Path(path)
    try:
        size = p.stat().st_size
        if size > Runner.MAX_DOCUMENT_BYTES:
            raise ValidationError(
                f"{path} is {size} bytes, over the {Runner.MAX_DOCUMENT_BYTES} byte cap",
                code=ReasonCode.GHK_ERROR_MALFORMED_INPUT,
            )
        return p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc}", code=ReasonCode.GHK_ERROR_MALFORMED_INPUT) from exc


def read_points(path: str, d: int) -> FloatArray:
    """Plain text, one point per line, d whitespace-separated reals; '#' starts a comment line."""
    rows: list[list[float]] = []
    for lineno, line in enumerate(_read_capped(path).splitlines(), start=1):
        text = line.strip()
        if not text or text.startswith("#"):
            continue
        try:
            row = [float(tok) for tok in text.split()]
        except ValueError as exc:
            raise ValidationError(
                f"{path}:{lineno}: not a list of numbers", code=ReasonCode.GHK_ERROR_MALFORMED_INPUT
            ) from exc
        if len(row) != d or not all(np.isfinite(row)):
            raise ValidationError(
                f"{path}:{lineno}: expected {d} finite coordinates", code=ReasonCode.GHK_ERROR_MALFORMED_INPUT
            )
        rows.append(row)
    if not rows:
        raise ValidationError(f"{path} holds no points", code=ReasonCode.GHK_ERROR_MALFORMED_INPUT)
    if len(rows) > multivariate.MAX_POINTS:
        raise ValidationError(
            f"{path} holds {len(rows)} points, over {multivariate.MAX_POINTS}",
            code=ReasonCode.GHK_ERROR_MALFORMED_INPUT,
        )
    return np.array(rows, dtype=float)


def parse_multivar_doc(text: str) -> dict[str, Any]:
    """JSON object {p, d, a, alpha, beta, gamma, rho, psi1?, psi2?, condition_set?}."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"model document is not JSON: {exc}", code=ReasonCode.GHK_ERROR_MALFORMED_INPUT) from exc
    if not isinstance(doc, dict):
        raise ValidationError("model document must be a JSON object", code=ReasonCode.GHK_ERROR_MALFORMED_INPUT)
    return doc


def _kernel_from(args: argparse.Namespace) -> KernelParams:
    return KernelParams(a=args.a, alpha=args.alpha, beta=args.beta, gamma_=args.gamma, sigma2=args.sigma2)


class Runner:
    """Dispatches a parsed command and wraps its outcome in the output envelope."""

    TOOL: str = "ghkernel"
    SCHEMA_VERSION: int = 1
    MAX_DOCUMENT_BYTES: int = 1_000_000

    def __init__(self, stdout: TextIO, stderr: TextIO) -> None:
        self.stdout = stdout
        self.stderr = stderr
        self.handlers: dict[str, Callable[[argparse.Namespace], tuple[Any, list[str], list[list[Any]], int]]] = {
            "eval": self._eval,
            "spectral": self._spectral,
            "check-params": self._check_params,
            "smoothness": self._smoothness,
            "montee": self._montee,
            "descente": self._descente,
            "make": self._make,
            "check-multivar": self._check_multivar,
            "gram": self._gram,
            "simulate": self._simulate,
            "converge": self._converge,
            "selftest": self._selftest,
        }

    # ----------------------------
    # envelope
    # ----------------------------

    def run(self, args: argparse.Namespace) -> int:
        verb = args.verb
        try:
            result, header, rows, code = self.handlers[verb](args)
        except KernelError as exc:
            return self._error(verb, exc)
        except UsageError as exc:
            self.stderr.write(json.dumps(self.error_envelope(verb, ReasonCode.GHK_ERROR_USAGE.value, str(exc))) + "\n")
            return EXIT_USAGE
        if args.format == "json":
            payload = {"tool": self.TOOL, "schema_version": self.SCHEMA_VERSION, "verb": verb, "result": result}
            out = dict(payload)
            out["ok"] = code == EXIT_OK
            out["context_hash"] = canonical_sha256(payload)
            self.stdout.write(json.dumps(out, sort_keys=True, allow_nan=False) + "\n")
        else:
            self.stdout.write(",".join(header) + "\n")
            for row in rows:
                self.stdout.write(",".join(_fmt(v) for v in row) + "\n")
        return code

    def _error(self, verb: str, exc: KernelError) -> int:
        if exc.code in _NUMERIC_CODES:
            exit_code = EXIT_NUMERIC
        elif exc.code is ReasonCode.GHK_ERROR_MALFORMED_INPUT:
            exit_code = EXIT_DATAERR
        else:
            exit_code = EXIT_VALIDATION
        envelope = self.error_envelope(verb, exc.code.value, exc.detail)
        envelope["context"] = exc.to_dict()["context"]
        self.stderr.write(json.dumps(envelope, sort_keys=True) + "\n")
        logger.debug("%s failed: %s (%s)", verb, exc.code.value, exc.detail)
        return exit_code

    @classmethod
    def error_envelope(cls, verb: str, reason_code: str, detail: str) -> dict[str, Any]:
        context_hash = canonical_sha256(
            {"tool": cls.TOOL, "schema_version": cls.SCHEMA_VERSION, "verb": verb, "reason_code": reason_code}
        )
        return {
            "tool": cls.TOOL,
            "schema_version": cls.SCHEMA_VERSION,
            "verb": verb,
            "ok": False,
            "reason_code": reason_code,
            "detail": detail,
            "context_hash": context_hash,
        }

    # ----------------------------
    # univariate verbs
    # ----------------------------

    def _eval(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        p = _kernel_from(args)
        radii = parse_grid(args.r)
        values = univariate.cov_eval_many(p, args.d, radii)
        rows = [[float(r), float(v)] for r, v in zip(radii, values, strict=True)]
        return {"params": p.to_dict(), "d": args.d, "rows": rows}, ["r", "value"], rows, EXIT_OK

    def _spectral(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        p = _kernel_from(args)
        freqs = parse_grid(args.u)
        values = univariate.spectral_eval_many(p, args.d, freqs)
        header = ["u", "value"]
        rows: list[list[Any]] = [[float(u), float(v)] for u, v in zip(freqs, values, strict=True)]
        if args.closed_form_spherical is not None:
            header.append("closed_form")
            for row in rows:
                row.append(
                    univariate.spherical_spectral_closed_form(args.d, args.closed_form_spherical, args.a, row[0])
                )
        return {"params": p.to_dict(), "d": args.d, "columns": header, "rows": rows}, header, rows, EXIT_OK

    def _check_params(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        rep = univariate.check_param_space(args.alpha, args.beta, args.gamma, args.d)
        if not rep.in_space:
            raise ParamSpaceError(
                f"(alpha, beta, gamma)=({args.alpha}, {args.beta}, {args.gamma}) outside P_{args.d}", report=rep
            )
        data = rep.to_dict()
        header = ["in_space", "cond_alpha", "cond_product", "cond_sum", "boundary"]
        return data, header, [[data[k] for k in header]], EXIT_OK

    def _smoothness(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        rep = univariate.smoothness(_kernel_from(args), args.d)
        data = rep.to_dict()
        header = ["k_origin", "k_range", "ms_diff_order"]
        return data, header, [[data[k] for k in header]], EXIT_OK

    def _walk(
        self, args: argparse.Namespace, op: Callable[[KernelParams, int, int], univariate.DimensionWalk]
    ) -> tuple[Any, list[str], list[list[Any]], int]:
        out = op(_kernel_from(args), args.d, args.k)
        data = {"params": out.params.to_dict(), "d": out.d, "scale": out.scale}
        header = ["a", "alpha", "beta", "gamma", "d", "scale"]
        row = [out.params.a, out.params.alpha, out.params.beta, out.params.gamma_, out.d, out.scale]
        return data, header, [row], EXIT_OK

    def _montee(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        return self._walk(args, univariate.montee)

    def _descente(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        return self._walk(args, univariate.descente)

    def _make(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        if args.kind == "bivariate":
            spec, mp = multivariate.make_bivariate(
                args.variant, args.d, args.a, args.shape1, args.shape2, args.common_shape, args.rho
            )
            data = {"spec": spec.to_dict(), "model": mp.to_dict()}
            header = ["variant", "rho", "rho_max", "rho_max_numeric"]
            return data, header, [[spec.variant.value, spec.rho, spec.rho_max, spec.rho_max_numeric]], EXIT_OK
        if args.kind == "spherical":
            p = univariate.make_spherical(args.d, args.kappa, args.a)
        elif args.kind == "askey":
            p = univariate.make_askey(args.d, args.ell, args.a)
        else:
            p = univariate.make_wendland(args.d, args.kappa, args.ell, args.a)
        if args.emit_params:
            data: dict[str, Any] = {"alpha": p.alpha, "beta": p.beta, "gamma": p.gamma_}
        else:
            data = p.to_dict()
        header = list(data.keys())
        return data, header, [list(data.values())], EXIT_OK

    # ----------------------------
    # multivariate and oracle verbs
    # ----------------------------

    def _check_multivar(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        doc = parse_multivar_doc(_read_capped(args.doc))
        report = multivariate.validity_from_doc(doc)
        rows = [[lab, msg] for lab, msg in report.failures]
        code = EXIT_OK if report.satisfied else EXIT_VALIDATION
        if not report.satisfied:
            self.stderr.write(
                json.dumps(self.error_envelope("check-multivar", report.verdict, "condition set not satisfied"))
                + "\n"
            )
        return report.to_dict(), ["label", "message"], rows, code

    def _gram(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        if args.doc:
            mp = MultivarParams.from_dict(parse_multivar_doc(_read_capped(args.doc)))
            pts = read_points(args.points, mp.d)
            res = multivariate.gram_multivar(mp, pts)
        else:
            pts = read_points(args.points, args.d)
            res = oracles.gram(pts, _kernel_from(args), args.d)
        summary = res.summary()
        if not res.psd:
            self.stderr.write(
                json.dumps(self.error_envelope("gram", ReasonCode.GHK_ERROR_NOT_PSD.value, "Gram matrix not PSD"))
                + "\n"
            )
        header = ["n", "min_eig", "max_eig", "psd", "nnz_fraction"]
        return summary, header, [[summary[k] for k in header]], EXIT_OK if res.psd else EXIT_VALIDATION

    def _simulate(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        pts = read_points(args.points, args.d)
        out = oracles.simulate_field(pts, _kernel_from(args), args.d, args.n_real, args.seed)
        variances = np.diag(out.empirical_cov)
        rows = [[i, float(v)] for i, v in enumerate(variances)]
        data = {
            "n": int(pts.shape[0]),
            "n_realizations": args.n_real,
            "seed": args.seed,
            "clipped_mass": out.clipped_mass,
            "empirical_variance": [float(v) for v in variances],
        }
        return data, ["point", "empirical_variance"], rows, EXIT_OK

    def _converge(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        target = LimitKernelSpec(LimitFamily(args.family), b=args.b, shape=args.shape, shape2=args.shape2)
        trace = oracles.convergence_harness(target, args.steps, args.d, args.first_step, args.route)
        rows = [
            [args.first_step + i, *q, e]
            for i, (q, e) in enumerate(zip(trace.parameter_path, trace.sup_errors, strict=True))
        ]
        return trace.to_dict(), ["m", "a", "alpha", "beta", "gamma", "sup_error"], rows, EXIT_OK

    def _selftest(self, args: argparse.Namespace) -> tuple[Any, list[str], list[list[Any]], int]:
        checks = oracles.selftest(nightly=args.nightly)
        rows = [[c.name, c.passed, c.detail] for c in checks]
        data = [c._asdict() for c in checks]
        return data, ["check", "passed", "detail"], rows, EXIT_OK if all(c.passed for c in checks) else EXIT_NUMERIC


def _kernel_flags(p: argparse.ArgumentParser, *, shapes: bool = True) -> None:
    p.add_argument("--d", type=int, required=True, help="dimension of the Euclidean space")
    p.add_argument("--a", type=float, default=1.0, help="range (default 1)")
    if shapes:
        p.add_argument("--alpha", type=float, required=True)
        p.add_argument("--beta", type=float, required=True)
        p.add_argument("--gamma", type=float, required=True)
        p.add_argument("--sigma2", type=float, default=1.0, help="variance (default 1)")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default=None, help="csv, or json for make --emit-params")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug logging")

    parser = _Parser(prog="ghkernel", description="Gauss hypergeometric covariance kernels")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True, parser_class=_Parser)

    p = sub.add_parser("eval", parents=[common], help="covariance values")
    _kernel_flags(p)
    p.add_argument("--r", required=True, help="radius or start:stop:count")

    p = sub.add_parser("spectral", parents=[common], help="spectral density values")
    _kernel_flags(p)
    p.add_argument("--u", required=True, help="frequency norm or start:stop:count")
    p.add_argument("--closed-form-spherical", type=int, default=None, metavar="KAPPA")

    p = sub.add_parser("check-params", parents=[common], help="membership in P_d")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--gamma", type=float, required=True)

    p = sub.add_parser("smoothness", parents=[common], help="differentiability orders")
    _kernel_flags(p)

    for verb in ("montee", "descente"):
        p = sub.add_parser(verb, parents=[common], help=f"{verb} of order k")
        _kernel_flags(p)
        p.add_argument("--k", type=int, required=True)

    p = sub.add_parser("make", parents=[common], help="special-case constructors")
    p.add_argument("kind", choices=["spherical", "askey", "wendland", "bivariate"])
    _kernel_flags(p, shapes=False)
    p.add_argument("--kappa", type=float, default=0.0)
    p.add_argument("--ell", type=float, default=None)
    p.add_argument("--emit-params", action="store_true", help="print only alpha, beta, gamma")
    p.add_argument("--variant", choices=[v.value for v in BivariateVariant], default="I")
    p.add_argument("--shape1", type=float, default=None)
    p.add_argument("--shape2", type=float, default=None)
    p.add_argument("--common-shape", type=float, default=None)
    p.add_argument("--rho", type=float, default=None)

    p = sub.add_parser("check-multivar", parents=[common], help="validate a multivariate model document")
    p.add_argument("--doc", required=True, help="JSON model document")

    p = sub.add_parser("gram", parents=[common], help="Gram matrix eigenvalue summary")
    _kernel_flags(p, shapes=False)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--gamma", type=float)
    p.add_argument("--sigma2", type=float, default=1.0)
    p.add_argument("--points", required=True, help="points file")
    p.add_argument("--doc", default=None, help="multivariate model document (block Gram)")

    p = sub.add_parser("simulate", parents=[common], help="Gaussian field realizations")
    _kernel_flags(p)
    p.add_argument("--points", required=True)
    p.add_argument("--n-real", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("converge", parents=[common], help="convergence trace to a limit kernel")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--family", choices=[f.value for f in LimitFamily], required=True)
    p.add_argument("--b", type=float, default=1.0)
    p.add_argument("--shape", type=float, default=0.0)
    p.add_argument("--shape2", type=float, default=None)
    p.add_argument("--steps", type=int, default=4)
    p.add_argument("--first-step", type=int, default=2)
    p.add_argument("--route", choices=list(univariate.GAUSSIAN_ROUTES), default="beta_to_alpha")

    p = sub.add_parser("selftest", parents=[common], help="fast oracle suite")
    p.add_argument("--nightly", action="store_true", help="add the slow oracle checks")
    return parser


def _check_required(args: argparse.Namespace) -> None:
    missing: list[str] = []
    if args.verb == "make":
        need = {
            "askey": ["ell"],
            "wendland": ["ell"],
            "bivariate": ["shape1", "shape2", "common_shape"],
        }.get(args.kind, [])
        missing = [n for n in need if getattr(args, n) is None]
    elif args.verb == "gram" and not args.doc:
        missing = [n for n in ("alpha", "beta", "gamma") if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.verb} needs --{', --'.join(m.replace('_', '-') for m in missing)}")


def main(argv: Sequence[str] | None = None, stdout: TextIO | None = None, stderr: TextIO | None = None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _check_required(args)
    except UsageError as exc:
        err.write(parser.format_usage())
        err.write(json.dumps(Runner.error_envelope("usage", ReasonCode.GHK_ERROR_USAGE.value, str(exc))) + "\n")
        return EXIT_USAGE
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(level=level, stream=err, format="%(levelname)s %(name)s: %(message)s")
    if args.format is None:
        args.format = "json" if getattr(args, "emit_params", False) else "csv"
    return Runner(out, err).run(args)
