"""Command-line front end: instance files in, JSON reports out.

An instance is one JSON document::

    {"field": {"kind": "prime", "p": 5},
     "quiver": {"vertices": ["x", "y"],
                "arrows": [{"name": "a1", "tail": "x", "head": "y"}]},
     "representation": {"dims": {"x": 3, "y": 3},
                        "maps": {"a1": [[0, 1, 0], [-1, 0, 0], [0, 0, 0]]}},
     "weight": {"x": 1, "y": -1},
     "alpha": {"x": 1, "y": 1}}

Matrices are row-major; arrow a has dims[head] rows and dims[tail] columns.
Over the rationals entries may be integers or strings like "3/4".

Exit codes: 0 ok, 1 internal or verification failure, 2 not semistable
(``semistable`` only), 3 invalid input, 4 randomized search failed,
5 oracle over its work limit.  Errors are JSON objects on stderr.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
import warnings
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import __version__, blocks
from .errors import InternalInvariantError, NcrankError, ProbabilisticFailure, ValidationError
from .exactlin import Field, Subspace, subspace_intersect
from .homext import nc_hom_ext, source_weight
from .matspace import Config, MatrixSpace, blow_up, certificate_for, ncrk
from .oracle import brute_discrepancy, brute_ncext_source, brute_ncext_target, brute_ncrk
from .quiver import Arrow, Quiver, Representation, Subrepresentation, euler_form, is_subrep, sigma_value
from .reduction import augmented_witness, build_sigma_space, optimal_witness, witness_report_for

DEFAULT_PRIME = 1000003
U64_MAX = 2**64 - 1


class InputWarning(UserWarning):
    pass


@dataclass(eq=True)
class Instance:
    rep: Representation
    weight: dict[str, int] | None = None
    alpha: dict[str, int] | None = None

    @property
    def field(self) -> Field:
        return self.rep.field

    @property
    def quiver(self) -> Quiver:
        return self.rep.quiver


# -- parsing and serialization -----------------------------------------------


def _parse_field(spec) -> Field:
    if spec is None:
        warnings.warn(f"no field given; using F_{DEFAULT_PRIME}", InputWarning, stacklevel=2)
        return Field.prime(DEFAULT_PRIME)
    if isinstance(spec, int) and not isinstance(spec, bool):
        return Field.prime(spec)
    if not isinstance(spec, dict):
        raise ValidationError("field must be an object like {\"kind\": \"prime\", \"p\": 5}")
    kind = spec.get("kind", "prime")
    if kind in ("prime", "prime-field"):
        p = spec.get("p")
        if not isinstance(p, int) or isinstance(p, bool):
            raise ValidationError("prime field needs an integer p")
        return Field.prime(p)
    if kind in ("rationals", "Q"):
        return Field.rationals()
    raise ValidationError(f"unknown field kind {kind!r}")


def _parse_entry(F: Field, v, where: str):
    if isinstance(v, bool) or not isinstance(v, (int, str)):
        raise ValidationError(f"{where}: entries must be integers (or fraction strings over Q), got {v!r}")
    if isinstance(v, str):
        try:
            v = Fraction(v)
        except (ValueError, ZeroDivisionError):
            raise ValidationError(f"{where}: cannot read {v!r} as a number") from None
        if F.p is not None and v.denominator % F.p == 0:
            raise ValidationError(f"{where}: denominator of {v} vanishes in {F}")
    return F.scalar(v)


def _parse_matrix(F: Field, data, shape, where: str) -> np.ndarray:
    rows, cols = shape
    if not isinstance(data, list) or (rows and len(data) != rows):
        raise ValidationError(f"{where}: expected {rows} rows")
    if rows == 0:
        if data not in ([], [[]]):
            raise ValidationError(f"{where}: expected an empty matrix")
        return F.zeros(shape)
    out = F.zeros(shape)
    reduced = False
    for i, row in enumerate(data):
        if not isinstance(row, list) or len(row) != cols:
            raise ValidationError(f"{where}: row {i} should have {cols} entries")
        for j, v in enumerate(row):
            x = _parse_entry(F, v, where)
            if F.p is not None and isinstance(v, int) and not 0 <= v < F.p:
                reduced = True
            out[i, j] = x
    if reduced:
        warnings.warn(f"{where}: entries outside [0, {F.p}) were reduced mod {F.p}", InputWarning, stacklevel=2)
    return out


def _parse_vector(q: Quiver, v, what: str) -> dict[str, int]:
    if isinstance(v, list):
        if len(v) != len(q.vertices):
            raise ValidationError(f"{what} needs one entry per vertex")
        v = dict(zip(q.vertices, v))
    if not isinstance(v, dict) or any(isinstance(x, bool) or not isinstance(x, int) for x in v.values()):
        raise ValidationError(f"{what} must map vertices to integers")
    return q.check_vector(v, what)


def parse_instance(doc) -> Instance:
    if not isinstance(doc, dict):
        raise ValidationError("instance must be a JSON object")
    for key in ("quiver", "representation"):
        if key not in doc:
            raise ValidationError(f"instance is missing {key!r}")
    F = _parse_field(doc.get("field"))
    qd = doc["quiver"]
    try:
        arrows = tuple(Arrow(str(a["name"]), str(a["tail"]), str(a["head"])) for a in qd.get("arrows", []))
        q = Quiver(tuple(qd["vertices"]), arrows)
    except (KeyError, TypeError, AttributeError) as exc:
        raise ValidationError(f"malformed quiver: {exc}") from None
    rd = doc["representation"]
    if not isinstance(rd, dict) or "dims" not in rd:
        raise ValidationError("representation needs dims")
    dims = _parse_vector(q, rd["dims"], "dims")
    if any(d < 0 for d in dims.values()):
        raise ValidationError("dims must be nonnegative")
    raw_maps = rd.get("maps", {})
    if not isinstance(raw_maps, dict):
        raise ValidationError("maps must be an object keyed by arrow name")
    unknown = set(raw_maps) - {a.name for a in q.arrows}
    if unknown:
        raise ValidationError(f"maps given for unknown arrows {sorted(unknown)}")
    maps = {
        a.name: _parse_matrix(F, raw_maps[a.name], (dims[a.head], dims[a.tail]), f"map {a.name}")
        for a in q.arrows
        if a.name in raw_maps
    }
    rep = Representation(q, F, dims, maps)
    weight = _parse_vector(q, doc["weight"], "weight") if doc.get("weight") is not None else None
    alpha = _parse_vector(q, doc["alpha"], "alpha") if doc.get("alpha") is not None else None
    if alpha is not None and any(v < 0 for v in alpha.values()):
        raise ValidationError("alpha must be nonnegative")
    return Instance(rep, weight, alpha)


def _enc_scalar(x):
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else str(x)
    return int(x)


def encode_matrix(m) -> list:
    m = np.asarray(m)
    return [[_enc_scalar(v) for v in row] for row in m]


def encode_subspace(u: Subspace) -> dict:
    return {"ambient_dim": u.ambient_dim, "dim": u.dim, "basis": encode_matrix(u.basis)}


def decode_subspace(F: Field, doc) -> Subspace:
    n = doc["ambient_dim"]
    rows = [[_parse_entry(F, v, "report basis") for v in r] for r in doc["basis"]]
    return Subspace.span(F, F.asarray(rows, (len(rows), n)), n) if rows else Subspace.zero(F, n)


def serialize_instance(inst: Instance) -> dict:
    w, F = inst.rep, inst.field
    doc = {
        "field": {"kind": "prime", "p": F.p} if F.p is not None else {"kind": "rationals"},
        "quiver": {
            "vertices": list(w.quiver.vertices),
            "arrows": [{"name": a.name, "tail": a.tail, "head": a.head} for a in w.quiver.arrows],
        },
        "representation": {
            "dims": dict(w.dims),
            "maps": {a.name: encode_matrix(w.maps[a.name]) for a in w.quiver.arrows},
        },
    }
    if inst.weight is not None:
        doc["weight"] = dict(inst.weight)
    if inst.alpha is not None:
        doc["alpha"] = dict(inst.alpha)
    return doc


def instance_digest(inst: Instance) -> str:
    canon = json.dumps(serialize_instance(inst), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


def load_instance(path: str) -> Instance:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path} is not valid JSON: {exc}") from None
    return parse_instance(doc)


# -- commands -----------------------------------------------------------------


def _cfg(args) -> Config:
    return Config(seed=args.seed, max_retries=args.retries, mode=args.mode, blowup_d=args.blowup_d)


def _is_kronecker_type(q: Quiver) -> bool:
    ends = {(a.tail, a.head) for a in q.arrows}
    return len(ends) == 1 and next(iter(ends))[0] != next(iter(ends))[1]


def space_for(inst: Instance) -> tuple[MatrixSpace, str]:
    """The matrix space a ``ncrk`` run works on, with a short description."""
    w = inst.rep
    if inst.weight is not None:
        return build_sigma_space(w, inst.weight)[0], "sigma-reduced"
    if not _is_kronecker_type(w.quiver):
        raise ValidationError("ncrk needs a weight or a quiver whose arrows all go from one vertex to another")
    a0 = w.quiver.arrows[0]
    s = MatrixSpace(w.field, w.dims[a0.head], w.dims[a0.tail], [w.maps[a.name] for a in w.quiver.arrows])
    return s, "arrow-span"


def _witness_payload(rep) -> dict:
    return {x: encode_subspace(u) for x, u in rep.witness.spaces.items()}


def cmd_ncrk(inst: Instance, args) -> tuple[dict, dict, dict]:
    s, kind = space_for(inst)
    res = ncrk(s, _cfg(args))
    cert = res.certificate
    result = {"ncrk": res.rank, "rows": s.rows, "cols": s.cols, "space": kind}
    certificate = {
        "shrunk_subspace": encode_subspace(cert.u),
        "image": encode_subspace(cert.image),
        "c": cert.c,
        "minimal": cert.minimal,
        "blowup_d": res.d,
        "witness_element": None if res.witness is None else encode_matrix(res.witness),
    }
    return result, certificate, res.trace


def _minimal_of(optima: list[Subrepresentation]) -> Subrepresentation:
    first = optima[0]
    spaces = dict(first.spaces)
    for sub in optima[1:]:
        spaces = {x: subspace_intersect(spaces[x], sub.spaces[x]) for x in spaces}
    return Subrepresentation(first.parent, spaces)


def _witnesses(inst: Instance, args):
    if inst.weight is None:
        raise ValidationError(f"{args.command} needs a weight")
    w, sigma, cfg = inst.rep, inst.weight, _cfg(args)
    if args.mode == "oracle":
        disc, optima = brute_discrepancy(w, sigma)
        rep = witness_report_for(w, sigma, _minimal_of(optima))
        rep.minimal = True
        rep.trace = {"mode": "oracle", "optima": len(optima)}
        return {"oracle": rep}
    algo = getattr(args, "algo", "reduced")
    out = {}
    if algo in ("reduced", "both"):
        out["reduced"] = optimal_witness(w, sigma, cfg)
    if algo in ("augmented", "both"):
        out["augmented"] = augmented_witness(w, sigma, cfg)
    return out


def _witness_sections(inst: Instance, reps: dict) -> tuple[dict, dict, dict]:
    first = next(iter(reps.values()))
    for name, rep in reps.items():
        if rep.discrepancy != first.discrepancy or rep.witness != first.witness:
            raise InternalInvariantError(f"pipeline {name} disagrees with {next(iter(reps))}")
    result = {
        "discrepancy": first.discrepancy,
        "semistable": first.semistable,
        "sigma_of_dims": sigma_value(inst.weight, inst.rep.dims),
        "witness_dims": first.witness.dims,
        "minimal": first.minimal,
        "pipelines": list(reps),
    }
    certificate = {
        "witness": _witness_payload(first),
        "shrunk_subspace": encode_subspace(first.certificate.u),
        "c": first.certificate.c,
    }
    trace = {name: rep.trace for name, rep in reps.items()}
    return result, certificate, trace


def cmd_witness(inst: Instance, args):
    return _witness_sections(inst, _witnesses(inst, args))


def cmd_semistable(inst: Instance, args):
    return _witness_sections(inst, _witnesses(inst, args))


def cmd_homext(inst: Instance, args):
    if inst.alpha is None:
        raise ValidationError(f"{args.command} needs alpha")
    w, alpha, cfg = inst.rep, inst.alpha, _cfg(args)
    q = w.quiver
    if args.orientation == "target-fixed":
        euler = euler_form(q, alpha, w.dims)
        if args.mode == "oracle":
            ext = brute_ncext_target(alpha, w)
            return (
                {"nchom": ext + euler, "ncext": ext, "euler_form": euler, "orientation": args.orientation},
                {},
                {"mode": "oracle"},
            )
        res = nc_hom_ext(alpha, w, cfg)
        result = {"nchom": res.nchom, "ncext": res.ncext, "euler_form": euler, "orientation": args.orientation}
        certificate = {
            "subrep": {x: encode_subspace(u) for x, u in res.subrep.spaces.items()},
            "factor_dims": res.factor_dims,
        }
        return result, certificate, res.trace
    # source-fixed: the instance representation is V and alpha plays beta
    beta = alpha
    euler = euler_form(q, w.dims, beta)
    if args.mode == "oracle":
        ext = brute_ncext_source(w, beta)
        return (
            {"nchom": ext + euler, "ncext": ext, "euler_form": euler, "orientation": args.orientation},
            {},
            {"mode": "oracle"},
        )
    sigma = source_weight(w, beta)
    rep = optimal_witness(w, sigma, cfg)
    ext = rep.discrepancy
    result = {"nchom": ext + euler, "ncext": ext, "euler_form": euler, "orientation": args.orientation}
    certificate = {"subrep": _witness_payload(rep), "sigma": sigma}
    return result, certificate, rep.trace


def cmd_oracle(inst: Instance, args):
    w = inst.rep
    result, certificate = {}, {}
    if inst.weight is not None:
        disc, optima = brute_discrepancy(w, inst.weight)
        minimal = _minimal_of(optima)
        result["discrepancy"] = disc
        result["optimal_witnesses"] = len(optima)
        result["semistable"] = disc == 0 and sigma_value(inst.weight, w.dims) == 0
        certificate["witness"] = {x: encode_subspace(u) for x, u in minimal.spaces.items()}
    if inst.weight is not None or _is_kronecker_type(w.quiver):
        s, kind = space_for(inst)
        r, u = brute_ncrk(s)
        result["ncrk"] = r
        result["space"] = kind
        certificate["shrunk_subspace"] = encode_subspace(u)
    if inst.alpha is not None:
        result["ncext_target_fixed"] = brute_ncext_target(inst.alpha, w)
        result["ncext_source_fixed"] = brute_ncext_source(w, inst.alpha)
    if not result:
        raise ValidationError("nothing to compute: give a weight, alpha, or a Kronecker-type quiver")
    return result, certificate, {"mode": "oracle"}


COMMANDS = {
    "ncrk": cmd_ncrk,
    "witness": cmd_witness,
    "semistable": cmd_semistable,
    "nchom": cmd_homext,
    "ncext": cmd_homext,
    "oracle": cmd_oracle,
}


def _flags(args) -> dict:
    out = {"seed": args.seed, "retries": args.retries, "mode": args.mode, "blowup_d": args.blowup_d}
    for key in ("algo", "orientation"):
        if hasattr(args, key):
            out[key] = getattr(args, key)
    return out


def build_report(inst: Instance, args, notes=()) -> dict:
    """Run ``args.command`` on ``inst``; ``notes`` are warnings raised earlier (e.g. on load)."""
    t0 = time.perf_counter()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        result, certificate, trace = COMMANDS[args.command](inst, args)
    trace = dict(trace)
    if args.timing:
        trace["timing_s"] = round(time.perf_counter() - t0, 6)
    msgs = list(dict.fromkeys([*notes, *(str(w.message) for w in caught)]))
    return {
        "command": args.command,
        "version": __version__,
        "instance_digest": instance_digest(inst),
        "flags": _flags(args),
        "result": result,
        "certificate": certificate,
        "trace": trace,
        "warnings": msgs,
    }


def run(args) -> dict:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        inst = load_instance(args.file)
    return build_report(inst, args, [str(w.message) for w in caught])


# -- verification -------------------------------------------------------------


class VerificationError(NcrankError):
    exit_code = 1


def _check(ok: bool, what: str, checks: list[str]):
    if not ok:
        raise VerificationError(what)
    checks.append(what)


def _decode_subrep(w: Representation, doc) -> dict[str, Subspace]:
    return {x: decode_subspace(w.field, doc[x]) for x in w.quiver.vertices}


def verify_report(report: dict, inst: Instance) -> list[str]:
    """Re-check every certificate in ``report`` against ``inst``; returns the checks done."""
    checks: list[str] = []
    _check(report.get("instance_digest") == instance_digest(inst), "instance digest matches", checks)
    cmd, res, cert = report.get("command"), report.get("result", {}), report.get("certificate", {})
    w, F = inst.rep, inst.field
    if cmd == "ncrk" or (cmd == "oracle" and "shrunk_subspace" in cert):
        s, _ = space_for(inst)
        u = decode_subspace(F, cert["shrunk_subspace"])
        c = certificate_for(s, u).c
        _check(res["ncrk"] == s.cols - c, "shrunk subspace gives the reported rank as an upper bound", checks)
        elem = cert.get("witness_element")
        if elem is not None:
            d = cert["blowup_d"]
            big = blow_up(s, d)
            a = F.asarray(elem, (big.rows, big.cols)) if big.rows and big.cols else F.zeros((big.rows, big.cols))
            _check(big.coefficients_of(a) is not None, "witness element lies in the blow-up", checks)
            _check(F.rank(a) == d * res["ncrk"], "witness element rank matches the upper bound", checks)
    if cmd in ("witness", "semistable") or (cmd == "oracle" and "witness" in cert):
        spaces = _decode_subrep(w, cert["witness"])
        _check(is_subrep(w, spaces), "witness is a subrepresentation", checks)
        val = sigma_value(inst.weight, {x: u.dim for x, u in spaces.items()})
        _check(val == res["discrepancy"], "witness attains the discrepancy", checks)
        if "shrunk_subspace" in cert and cmd != "oracle":
            s, bs = build_sigma_space(w, inst.weight)
            u = blocks.assemble(F, spaces, bs.domain, s.cols)
            _check(certificate_for(s, u).c == res["discrepancy"], "witness spans a shrunk subspace of the same size", checks)
        semi = sigma_value(inst.weight, w.dims) == 0 and res["discrepancy"] == 0
        _check(res["semistable"] == semi, "semistability verdict follows from the discrepancy", checks)
    if cmd in ("nchom", "ncext") and "subrep" in cert:
        spaces = _decode_subrep(w, cert["subrep"])
        _check(is_subrep(w, spaces), "certificate is a subrepresentation", checks)
        alpha = inst.alpha
        dims = {x: u.dim for x, u in spaces.items()}
        if res["orientation"] == "target-fixed":
            factor = {x: w.dims[x] - dims[x] for x in dims}
            _check(-euler_form(w.quiver, alpha, factor) == res["ncext"], "factor attains ncext", checks)
            _check(res["nchom"] - res["ncext"] == euler_form(w.quiver, alpha, w.dims), "nchom - ncext = <alpha, beta>", checks)
        else:
            _check(-euler_form(w.quiver, dims, alpha) == res["ncext"], "subrepresentation attains ncext", checks)
            _check(res["nchom"] - res["ncext"] == euler_form(w.quiver, w.dims, alpha), "nchom - ncext = <alpha, beta>", checks)
    return checks


# -- entry point --------------------------------------------------------------


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v <= U64_MAX:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_u64, default=0)
    common.add_argument("--retries", type=_positive, default=8)
    common.add_argument("--mode", choices=["randomized", "oracle"], default="randomized")
    common.add_argument("--blowup-d", type=_positive, default=None, dest="blowup_d")
    common.add_argument("--timing", action="store_true", help="add wall-clock time to the trace")
    common.add_argument("--indent", type=int, default=2)

    p = argparse.ArgumentParser(prog="ncrank", description=__doc__.split("\n")[0])
    p.add_argument("--version", action="version", version=f"ncrank {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("ncrk", parents=[common], help="non-commutative rank").add_argument("file")
    for name in ("witness", "semistable"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("file")
        sp.add_argument("--algo", choices=["reduced", "augmented", "both"], default="reduced")
    for name in ("nchom", "ncext"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("file")
        sp.add_argument("--orientation", choices=["target-fixed", "source-fixed"], default="target-fixed")
    sub.add_parser("oracle", parents=[common], help="brute-force reference values").add_argument("file")
    vp = sub.add_parser("verify", help="re-validate a report against its instance")
    vp.add_argument("report")
    vp.add_argument("file")
    vp.add_argument("--indent", type=int, default=2)
    return p


def _emit_error(exc: Exception, code: int) -> int:
    doc = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    if isinstance(exc, ProbabilisticFailure):
        doc["lower_bound"] = exc.lower_bound
    print(json.dumps(doc, sort_keys=True), file=sys.stderr)
    return code


def _dump(doc, indent) -> str:
    return json.dumps(doc, sort_keys=True, indent=indent if indent > 0 else None)


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "verify":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", InputWarning)
                inst = load_instance(args.file)
            try:
                with open(args.report, encoding="utf-8") as fh:
                    report = json.load(fh)
            except (OSError, json.JSONDecodeError) as exc:
                raise ValidationError(f"cannot read report {args.report}: {exc}") from None
            checks = verify_report(report, inst)
            print(_dump({"command": "verify", "verified": True, "checks": checks}, args.indent))
            return 0
        report = run(args)
    except NcrankError as exc:
        return _emit_error(exc, exc.exit_code)
    except (KeyError, TypeError) as exc:
        return _emit_error(ValidationError(f"malformed input: {exc}"), 3)
    for msg in report["warnings"]:
        print(json.dumps({"warning": msg}), file=sys.stderr)
    print(_dump(report, args.indent))
    if args.command == "semistable" and not report["result"]["semistable"]:
        return 2
    return 0
