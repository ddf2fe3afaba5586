"""Command line entry point: ``carnot <group> <action> ...``.

Exit codes: 0 when the verdict holds, 1 when it is refuted (or cannot be
decided), 2 on input errors.
"""
from __future__ import annotations

import argparse
import hashlib
import math
import os
import sys
import time
from importlib import resources

from . import __version__
from . import io as cio
from . import linalg as la
from .autgroup import asymmetry_verdict, graded_derivations, validate_asymmetric, validate_not_asymmetric
from .lie import GradedAlgebra, check_jacobi, is_nilpotent, lower_central_series, verify_grading
from .metivier import NonGenericPointError, genericity_check, tangent_cone
from .scalar import FieldMismatchError, format_scalar, parse_scalar
from .spectra import (
    heisenberg_additivity_exact,
    layer_spectra,
    lyapunov_spectrum,
    verify_arithmeticity,
    verify_subadditivity,
)

EXAMPLES = ("smale", "sqrt2")


class InputError(Exception):
    pass


def data_path(name: str) -> str:
    return str(resources.files("carnot") / "data" / name)


def resolve(path: str) -> str:
    """Use the given path, or fall back to the bundled file with the same basename."""
    if os.path.exists(path):
        return path
    bundled = data_path(os.path.basename(path))
    if os.path.exists(bundled):
        return bundled
    raise InputError(f"no such file: {path}")


class Run:
    def __init__(self, command: str):
        self.command = command
        self.inputs: list[dict] = []

    def load(self, path: str):
        real = resolve(path)
        with open(real, "rb") as fh:
            blob = fh.read()
        self.inputs.append({"name": os.path.basename(path), "sha256": hashlib.sha256(blob).hexdigest()})
        return cio.load_json(real)

    def report(self, ok: bool, verdicts: dict) -> tuple[int, dict]:
        rep = {
            "command": self.command,
            "inputs": self.inputs,
            "status": "verified" if ok else "refuted",
            "tool_version": __version__,
            "verdicts": verdicts,
        }
        return (0 if ok else 1), rep


def _graded(obj) -> GradedAlgebra:
    g = cio.algebra_from_json(obj)
    if not isinstance(g, GradedAlgebra):
        raise InputError("algebra file has no grading")
    return g


def _point(text: str, d: int):
    try:
        return tuple(parse_scalar(t, d) for t in text.split(","))
    except ValueError as exc:
        raise InputError(f"bad point {text!r}: {exc}") from None


# commands --------------------------------------------------------------------------

def cmd_algebra_check(args, run: Run):
    g = cio.algebra_from_json(run.load(args.file))
    alg = g.algebra if isinstance(g, GradedAlgebra) else g
    jac = check_jacobi(alg)
    v: dict = {"dim": alg.dim, "field": cio.field_to_json(alg.field)}
    if jac.ok:
        v["jacobi"] = "ok"
    else:
        v["jacobi"] = {"fails": list(jac.triple), "residual": [format_scalar(x) for x in jac.residual]}
        return run.report(False, v)
    lcs = lower_central_series(alg)
    v["lower_central_series"] = lcs
    v["nilpotent"] = lcs[-1] == 0
    ok = v["nilpotent"]
    if isinstance(g, GradedAlgebra):
        gv = verify_grading(g)
        v["grading"] = gv.label
        if gv.description:
            v["grading_detail"] = gv.description
        ok = ok and gv.is_graded
    else:
        v["grading"] = "absent"
    return run.report(ok, v)


def cmd_algebra_autos(args, run: Run):
    g = _graded(run.load(args.file))
    space = graded_derivations(g)
    v = {
        "dim": space.dim,
        "closed_under_bracket": space.is_closed(),
        "basis": [cio.matrix_to_json(D) for D in space.basis],
    }
    return run.report(v["closed_under_bracket"], v)


def cmd_algebra_asymmetry(args, run: Run):
    g = _graded(run.load(args.file))
    res = asymmetry_verdict(g, seed=args.seed)
    v: dict = {"verdict": res.verdict, "level": res.level}
    if res.verdict == "not_asymmetric":
        v["certificate"] = {
            "derivation": cio.matrix_to_json(res.certificate),
            "eigenvalue_interval": [format_scalar(x) for x in res.eigen_interval],
            "validated": validate_not_asymmetric(g, res.certificate, res.eigen_interval),
        }
    elif res.verdict == "asymmetric":
        v["certificate"] = {
            "inner_product": cio.matrix_to_json(res.certificate),
            "validated": validate_asymmetric(g, res.certificate),
        }
    else:
        v["notes"] = res.notes
    return run.report(res.verdict == "asymmetric", v)


def cmd_cone_compute(args, run: Run):
    dist = cio.distribution_from_json(run.load(args.file))
    fields = dist["fields"]
    n = fields[0].n
    if args.point is not None:
        p = _point(args.point, dist["field"])
    else:
        p = dist["point"] or (0,) * n
    if len(p) != n:
        raise InputError(f"point needs {n} coordinates")
    gen = genericity_check(fields, p)
    v: dict = {"point": [format_scalar(x) for x in la.as_vector(p)], "dims": list(gen.base_dims)}
    if not gen.generic:
        v["genericity"] = {
            "verdict": "non_generic",
            "witness": [format_scalar(x) for x in gen.witness],
            "witness_dims": list(gen.witness_dims),
        }
        return run.report(False, v)
    v["genericity"] = {"verdict": "generic", "order": gen.order}
    try:
        cone = tangent_cone(fields, p, names=dist["names"])
    except NonGenericPointError as exc:  # pragma: no cover - caught above
        raise InputError(str(exc)) from None
    alg = cone.algebra
    jac = check_jacobi(alg.algebra)
    gv = verify_grading(alg)
    v["floor"] = list(cone.filtration.floor)
    v["frame"] = list(cone.frame.labels)
    v["algebra"] = cio.algebra_to_json(alg)
    v["jacobi"] = "ok" if jac.ok else "fails"
    v["lower_central_series"] = lower_central_series(alg.algebra)
    v["grading"] = gv.label
    v["bracket_identity_failures"] = [list(t) for t in cone.bracket_identity_failures()]
    ok = jac.ok and gv.label == "graded_carnot" and not v["bracket_identity_failures"]
    return run.report(ok, v)


def cmd_spectrum_verify(args, run: Run):
    A, dA = cio.map_from_json(run.load(args.file))
    g = _graded(run.load(args.algebra))
    if g.field != 1 and dA != 1 and g.field != dA:
        raise FieldMismatchError(f"algebra over Q(sqrt {g.field}) but map over Q(sqrt {dA})")
    if len(A) != g.dim:
        raise InputError(f"map is {len(A)}x{len(A)} but the algebra has dimension {g.dim}")
    spec = lyapunov_spectrum(A)
    v: dict = {"theorem": args.theorem, "spectrum": spec.to_dict()}
    if args.theorem == "arith":
        res = verify_arithmeticity(A, g)
        v.update(holds=res.holds, **{"lambda": res.lam}, max_deviation=res.max_deviation,
                 expected=[{"value": a, "multiplicity": m} for a, m in res.expected])
        if res.reason:
            v["reason"] = res.reason
        return run.report(res.holds, v)
    levels = layer_spectra(A, g)
    if levels is None:
        v.update(holds=False, reason="not block upper triangular")
        return run.report(False, v)
    if args.theorem == "subadd":
        res = verify_subadditivity(levels)
        v.update(holds=res.holds, levels=levels)
        if res.violation:
            v["violation"] = list(res.violation)
        return run.report(res.holds, v)
    try:
        res = heisenberg_additivity_exact(A, g)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    v.update(holds=res.holds, n=res.n, deviation=res.deviation)
    return run.report(res.holds, v)


def _system_from_args(args, run: Run):
    from .nilmanifold import build_product_anosov, build_smale_system

    if args.example == "smale":
        return build_smale_system()
    if args.example == "sqrt2":
        return cio.system_from_json(run.load("sqrt2_system.json"))
    if not args.algebra or not args.lam:
        raise InputError("give --example or both --algebra and --lambda")
    g = _graded(run.load(args.algebra))
    d = args.field or g.field
    try:
        lam = parse_scalar(args.lam, d)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    weights = [int(w) for w in args.weights.split(",")] if args.weights else None
    return build_product_anosov(g, lam, weights)


def cmd_anosov_build(args, run: Run):
    from .nilmanifold import AnosovConstructionError

    try:
        system = _system_from_args(args, run)
    except AnosovConstructionError as exc:
        return run.report(False, {"constructed": False, "failed_certificate": exc.certificate,
                                  "detail": exc.detail})
    spec = lyapunov_spectrum(system.map)
    unstable = lyapunov_spectrum(system.unstable_block())
    v = {
        "constructed": True,
        "system": cio.system_to_json(system),
        "spectrum": spec.to_dict(),
        "unstable_spectrum": unstable.to_dict(),
        "traces_of_lattice_blocks": [
            format_scalar(system.lattice_map[k][k] + system.lattice_map[k + 1][k + 1])
            for k in range(0, system.dim, 2)
        ],
    }
    return run.report(all(system.certificates.values()), v)


def cmd_lyapunov_estimate(args, run: Run):
    from .nilmanifold import (
        NumericalBlowup,
        automorphism_map,
        build_smale_system,
        make_periodic_perturbation,
        qr_lyapunov_estimate,
        translated_map,
    )

    if args.system in EXAMPLES:
        system = build_smale_system() if args.system == "smale" else cio.system_from_json(
            run.load("sqrt2_system.json"))
    else:
        system = cio.system_from_json(run.load(args.system))
    if args.translate:
        g0 = [float(parse_scalar(t, system.field)) for t in args.translate.split(",")]
        if len(g0) != system.dim:
            raise InputError(f"translation needs {system.dim} coordinates")
        fmap = translated_map(system, g0)
    elif args.eps:
        try:
            fmap = make_periodic_perturbation(system, args.eps, seed=args.seed)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    else:
        fmap = automorphism_map(system)
    exact = lyapunov_spectrum(system.map).values()
    try:
        est = qr_lyapunov_estimate(fmap, iterations=args.iters, seed=args.seed)
    except NumericalBlowup as exc:
        return run.report(False, {"blowup_iteration": exc.iteration})
    rows = [
        {"exact": e, "estimate": float(s), "deviation": abs(float(s) - e)}
        for e, s in zip(sorted(exact), est.exponents)
    ]
    dev = max(r["deviation"] for r in rows)
    v = {
        "eps": args.eps,
        "translate": args.translate,
        "report": est.report.to_dict(),
        "deviation_table": rows,
        "max_deviation": dev,
        "exponent_sum": float(sum(est.exponents)),
        "mean_log_det": est.mean_log_det,
    }
    return run.report(all(math.isfinite(r["estimate"]) for r in rows), v)


# rendering -------------------------------------------------------------------------

def _flatten(prefix: str, obj, out: list):
    if isinstance(obj, dict):
        for k in obj:
            _flatten(f"{prefix}.{k}" if prefix else str(k), obj[k], out)
    elif isinstance(obj, list) and obj and all(isinstance(x, dict) for x in obj):
        for i, x in enumerate(obj):
            _flatten(f"{prefix}[{i}]", x, out)
    else:
        out.append((prefix, obj))


def render_table(rep: dict) -> str:
    rows: list = []
    _flatten("", rep, rows)
    width = max(len(k) for k, _ in rows)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in rows)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="also write the report to this file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--timing", action="store_true", help="include wall time (breaks byte stability)")

    p = argparse.ArgumentParser(prog="carnot", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    groups = p.add_subparsers(dest="group", required=True)

    alg = groups.add_parser("algebra").add_subparsers(dest="action", required=True)
    for name, fn in (("check", cmd_algebra_check), ("autos", cmd_algebra_autos),
                     ("asymmetry", cmd_algebra_asymmetry)):
        sp = alg.add_parser(name, parents=[common])
        sp.add_argument("file")
        sp.set_defaults(func=fn)

    cone = groups.add_parser("cone").add_subparsers(dest="action", required=True)
    sp = cone.add_parser("compute", parents=[common])
    sp.add_argument("file")
    sp.add_argument("--point", help="comma separated coordinates, e.g. 0,0,0 or 1/2,0,r")
    sp.set_defaults(func=cmd_cone_compute)

    spec = groups.add_parser("spectrum").add_subparsers(dest="action", required=True)
    sp = spec.add_parser("verify", parents=[common])
    sp.add_argument("file", help="map JSON")
    sp.add_argument("--algebra", required=True)
    sp.add_argument("--theorem", choices=("arith", "subadd", "heis"), required=True)
    sp.set_defaults(func=cmd_spectrum_verify)

    ano = groups.add_parser("anosov").add_subparsers(dest="action", required=True)
    sp = ano.add_parser("build", parents=[common])
    sp.add_argument("--example", choices=EXAMPLES)
    sp.add_argument("--algebra")
    sp.add_argument("--lambda", dest="lam")
    sp.add_argument("--field", type=int, help="d for Q(sqrt d) when the algebra is rational")
    sp.add_argument("--weights", help="comma separated exponents, default the layer weights")
    sp.set_defaults(func=cmd_anosov_build)

    lyap = groups.add_parser("lyapunov").add_subparsers(dest="action", required=True)
    sp = lyap.add_parser("estimate", parents=[common])
    sp.add_argument("--system", required=True, help="system JSON, or 'smale' / 'sqrt2'")
    sp.add_argument("--eps", type=float, default=0.0)
    sp.add_argument("--iters", type=int, default=10_000)
    sp.add_argument("--translate", help="left-translate by this group element instead of perturbing")
    sp.set_defaults(func=cmd_lyapunov_estimate)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    run = Run(f"{args.group} {args.action}")
    start = time.perf_counter()
    try:
        code, rep = args.func(args, run)
    except (InputError, cio.FormatError, FieldMismatchError, ValueError, OSError) as exc:
        print(f"carnot: error: {exc}", file=sys.stderr)
        return 2
    if args.timing:
        rep["wall_time"] = round(time.perf_counter() - start, 6)
    text = cio.dumps(rep) if args.format == "json" else render_table(rep)
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
