"""Command line front end.

Exit codes: 0 when the analysis ran (whatever the verdict), 1 for bad input,
2 for numerical breakdown (stalled or non-terminating descent).
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .documents import DocumentError, MatrixDocument, number, read_document, to_jsonable
from .family import FamilyError, FamilyParams, build_gamma, build_gamma_exact
from .gaussian_state import inspect
from .numerics import ToleranceConfig, hermitian_eigen
from .separability import (
    EigenRecord,
    MinimalPoint,
    NotPpt,
    SeparabilityWitness,
    as_ppt,
    classify,
    forms,
    minimize_ppt,
)

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


class InputError(Exception):
    pass


def tolerances(args) -> ToleranceConfig:
    defaults = ToleranceConfig()
    try:
        return ToleranceConfig(
            rtol=args.rtol if args.rtol is not None else defaults.rtol,
            ntol=args.ntol if args.ntol is not None else defaults.ntol,
            btol=args.btol if args.btol is not None else defaults.btol,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _envelope(command: str, tol: ToleranceConfig) -> dict:
    return {
        "command": command,
        "tolerances": {"rtol": tol.rtol, "ntol": tol.ntol, "btol": tol.btol, "herm_tol": tol.herm_tol},
        "version": __version__,
    }


def _load(path) -> MatrixDocument:
    try:
        return read_document(path)
    except DocumentError as exc:
        raise InputError(str(exc)) from None


def _trace_payload(trace) -> list:
    return [
        {
            "xi": to_jsonable(s.xi),
            "epsilon": s.epsilon,
            "null_dims_before": list(s.null_dims_before),
            "null_dims_after": list(s.null_dims_after),
        }
        for s in trace
    ]


def validate_report(path, tol: ToleranceConfig) -> dict:
    doc = _load(path)
    rec = inspect(doc.gamma, doc.shape, tol)
    symmetric = rec.symmetry_residual <= tol.herm_tol * max(1.0, float(np.max(np.abs(doc.gamma))))
    positive = rec.min_eigenvalue >= -tol.rtol * max(1.0, float(rec.eigenvalues[-1]))
    verdict = "valid" if symmetric and positive else ("not_symmetric" if not symmetric else "not_a_state")
    report = _envelope("validate", tol)
    report.update(
        file=str(path),
        shape=[doc.f_a, doc.f_b],
        verdict=verdict,
        symmetry_residual=rec.symmetry_residual,
        min_eigenvalue=rec.min_eigenvalue,
        eigenvalues=to_jsonable(rec.eigenvalues),
    )
    return report


def certificate_payload(c) -> dict:
    cert = c.certificate
    if isinstance(cert, EigenRecord):
        out = {"matrix": cert.matrix, "min_eigenvalue": cert.min_eigenvalue}
        if cert.eigenvector is not None:
            out["eigenvector"] = to_jsonable(cert.eigenvector)
        else:
            out["asymmetry"] = cert.asymmetry
        return out
    if isinstance(cert, SeparabilityWitness):
        return {"gamma_a": to_jsonable(cert.gamma_a), "gamma_b": to_jsonable(cert.gamma_b)}
    if isinstance(cert, MinimalPoint):
        g = cert.g_min.gamma
        shape = c.shape
        return {
            "gamma_min": to_jsonable(g),
            "null_dims": list(cert.report.null_dims),
            "joint_span_dim": cert.report.joint_span_dim,
            "off_block_norm": float(np.linalg.norm(g[shape.alice, shape.bob])),
        }
    raise TypeError(f"unknown certificate {type(cert).__name__}")


def classify_report(path, tol: ToleranceConfig, trace: bool = False) -> dict:
    doc = _load(path)
    try:
        c = classify(doc.gamma, doc.shape, tol)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    report = _envelope("classify", tol)
    report.update(
        file=str(path),
        shape=[doc.f_a, doc.f_b],
        verdict=c.verdict.value,
        certificate=certificate_payload(c),
        steps=len(c.trace),
        warnings=list(c.warnings),
    )
    if trace:
        report["trace"] = _trace_payload(c.trace)
    return report


def minimize_report(path, out, tol: ToleranceConfig) -> dict:
    doc = _load(path)
    try:
        g = as_ppt(doc.gamma, doc.shape, tol)
    except (NotPpt, ValueError) as exc:
        raise InputError(f"{path}: {type(exc).__name__}: {exc}") from None
    g_min, trace = minimize_ppt(g, tol)
    meta = dict(doc.meta)
    meta.update(source=str(path), steps=str(len(trace)))
    MatrixDocument(doc.f_a, doc.f_b, g_min.gamma, doc.mean, meta).write(out)
    report = _envelope("minimize", tol)
    report.update(file=str(path), output=str(out), steps=len(trace), trace=_trace_payload(trace))
    return report


def generate_report(params, out, tol: ToleranceConfig) -> dict:
    try:
        p = FamilyParams(*params)
        approx = build_gamma(p, tol)
        gamma = build_gamma_exact(p, tol)
    except FamilyError as exc:
        raise InputError(f"{type(exc).__name__}: {exc}") from None
    if np.max(np.abs(gamma - approx)) > 1e-9 * max(1.0, float(np.max(np.abs(gamma)))):
        raise ArithmeticError("exact and floating-point constructions disagree")
    meta = {k: repr(number(v)) for k, v in p.as_dict().items()}
    MatrixDocument(2, 2, gamma, None, meta).write(out)
    report = _envelope("generate", tol)
    report.update(output=str(out), params={k: number(v) for k, v in p.as_dict().items()})
    return report


def eig_report(path, tol: ToleranceConfig) -> dict:
    doc = _load(path)
    sigma, sigma_t = forms(doc.shape)
    try:
        w, _ = hermitian_eigen(doc.gamma + 1j * sigma, tol)
        wt, _ = hermitian_eigen(doc.gamma + 1j * sigma_t, tol)
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from None
    report = _envelope("eig", tol)
    report.update(file=str(path), eig_sigma=to_jsonable(w), eig_sigma_t=to_jsonable(wt))
    return report


def _fmt(values) -> str:
    return " ".join(f"{v:.10g}" for v in values)


def render(report: dict) -> str:
    """Short human-readable rendering of a report."""
    cmd = report["command"]
    lines = []
    if cmd == "validate":
        lines += [
            f"{report['file']}: {report['verdict']}",
            f"  symmetry residual: {report['symmetry_residual']:.3e}",
            f"  min eigenvalue of gamma + i sigma: {report['min_eigenvalue']:.10g}",
        ]
    elif cmd == "classify":
        lines.append(f"{report['file']}: {report['verdict']}")
        cert = report["certificate"]
        if "gamma_a" in cert:
            lines.append("  witness gamma_A:")
            lines += ["    " + _fmt(r) for r in cert["gamma_a"]]
            lines.append("  witness gamma_B:")
            lines += ["    " + _fmt(r) for r in cert["gamma_b"]]
        elif "joint_span_dim" in cert:
            lines.append(f"  null dims {cert['null_dims']}, joint real span {cert['joint_span_dim']}")
            lines.append(f"  off-block norm of minimal point: {cert['off_block_norm']:.6g}")
        else:
            lines.append(f"  {cert['matrix']}: min eigenvalue {cert['min_eigenvalue']:.10g}")
        lines.append(f"  descent steps: {report['steps']}")
        for w in report["warnings"]:
            lines.append(f"  warning: {w}")
        for k, s in enumerate(report.get("trace", [])):
            lines.append(f"  step {k}: epsilon={s['epsilon']:.10g} xi=[{_fmt(s['xi'])}]")
    elif cmd == "minimize":
        lines.append(f"{report['file']} -> {report['output']}: {report['steps']} steps")
        for k, s in enumerate(report["trace"]):
            lines.append(f"  step {k}: epsilon={s['epsilon']:.10g} xi=[{_fmt(s['xi'])}]")
    elif cmd == "generate":
        p = report["params"]
        lines.append(f"wrote {report['output']} (" + ", ".join(f"{k}={v}" for k, v in p.items()) + ")")
    elif cmd == "eig":
        lines.append(f"{report['file']}")
        lines.append(f"  gamma + i sigma:   {_fmt(report['eig_sigma'])}")
        lines.append(f"  gamma + i sigma_t: {_fmt(report['eig_sigma_t'])}")
    return "\n".join(lines)


def _common_flags(parser, suppress: bool) -> None:
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--rtol", type=float, default=default, help="PSD slack (relative)")
    parser.add_argument("--ntol", type=float, default=default, help="null-space eigenvalue cutoff (relative)")
    parser.add_argument("--btol", type=float, default=default, help="block-diagonality cutoff (relative)")
    parser.add_argument(
        "--json", action="store_true", default=argparse.SUPPRESS if suppress else False, help="machine-readable output"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gaussppt", description=__doc__.splitlines()[0])
    _common_flags(parser, suppress=False)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check that a covariance matrix is a valid state")
    p.add_argument("file")
    _common_flags(p, suppress=True)

    p = sub.add_parser("classify", help="ppt / separability / bound entanglement verdict")
    p.add_argument("files", nargs="+", metavar="file")
    p.add_argument("--trace", action="store_true", help="include the full subtraction trace")
    p.add_argument("--jobs", type=int, default=1, help="classify several files in parallel")
    _common_flags(p, suppress=True)

    p = sub.add_parser("minimize", help="descend to a minimally ppt covariance")
    p.add_argument("file")
    p.add_argument("-o", "--out", required=True)
    _common_flags(p, suppress=True)

    p = sub.add_parser("generate", help="write a member of the 2x2 bound entangled family")
    for name in ("a", "b", "c", "e", "f"):
        p.add_argument(name, type=float)
    p.add_argument("-o", "--out", required=True)
    _common_flags(p, suppress=True)

    p = sub.add_parser("eig", help="eigenvalues of gamma + i sigma and gamma + i sigma_t")
    p.add_argument("file")
    _common_flags(p, suppress=True)
    return parser


def _classify_job(job):
    path, tol, trace = job
    try:
        return EXIT_OK, classify_report(path, tol, trace)
    except InputError as exc:
        return EXIT_INPUT, {"file": str(path), "error": str(exc)}
    except ArithmeticError as exc:
        return EXIT_NUMERIC, {"file": str(path), "error": f"{type(exc).__name__}: {exc}"}


def _emit(report: dict, as_json: bool, stream) -> None:
    if as_json:
        stream.write(json.dumps(report) + "\n")
    else:
        stream.write(render(report) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = tolerances(args)
        if args.command == "classify":
            jobs = [(f, tol, args.trace) for f in args.files]
            if args.jobs > 1 and len(jobs) > 1:
                with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                    results = list(pool.map(_classify_job, jobs))
            else:
                results = [_classify_job(j) for j in jobs]
            code = EXIT_OK
            for status, report in results:
                if status != EXIT_OK:
                    print(f"error: {report['error']}", file=sys.stderr)
                    code = max(code, status)
                else:
                    _emit(report, args.json, sys.stdout)
            return code
        if args.command == "validate":
            report = validate_report(args.file, tol)
        elif args.command == "minimize":
            report = minimize_report(args.file, args.out, tol)
        elif args.command == "generate":
            report = generate_report((args.a, args.b, args.c, args.e, args.f), args.out, tol)
        else:
            report = eig_report(args.file, tol)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except ArithmeticError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    _emit(report, args.json, sys.stdout)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
