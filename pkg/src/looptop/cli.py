"""Batch command-line front end.

Exit codes: 0 success (identity holds), 1 identity violated (a report is
printed), 2 input error.  ``LOOPTOP_FIELD`` sets the default coefficient
field for the ``sphere`` commands when ``--field`` is not given.

CSV written by ``profile verify --csv`` has columns ``r, h, dh, A, gap``
where ``A = r h' - h`` and ``gap = A - h'``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from . import annuli, chains, localsys, profiles
from .graded import SignConvention
from .identities import (
    check_assoc_comm_unit,
    check_coassociativity,
    check_cocommutativity,
    check_sullivan,
    epsilon_rule,
)
from .rings import ring_from_name
from .sphere import (
    CONVENTIONS,
    PINNED_CONVENTION,
    SphereLoopHomology,
    structure_diagnostics,
    sweep_conventions,
    table_as_json,
    table_as_text,
)

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _default_field(fallback: str) -> str:
    return os.environ.get("LOOPTOP_FIELD", fallback)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False)


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


# -- sphere

def _sphere_model(args) -> SphereLoopHomology:
    ring = ring_from_name(args.field or _default_field("F2"))
    K = args.truncation if args.truncation is not None else max(2 * args.k, 1)
    return SphereLoopHomology(n=3, K=K, ring=ring)


def cmd_sphere_coproduct(args, out) -> int:
    model = _sphere_model(args)
    if args.mode == "compare":
        rows = model.coproduct_table(args.k, "closed")
        mismatches = model.compare(args.k, args.convention)
        if args.format == "json":
            out.write(_dump({
                "result": "MATCH" if not mismatches else "MISMATCH",
                "convention": args.convention,
                "field": model.ring.name,
                "mismatches": [{"input": str(b), "recursive": str(r), "closed": str(c)} for b, r, c in mismatches],
                "table": json.loads(table_as_json(rows)),
            }) + "\n")
        else:
            out.write(("MATCH" if not mismatches else "MISMATCH")
                      + f" (k <= {args.k}, field {model.ring.name}, convention {args.convention})\n")
            for b, r, c in mismatches:
                out.write(f"  λ({b}): recursive = {r}, closed = {c}\n")
            out.write(table_as_text(rows) + "\n")
        return EXIT_OK if not mismatches else EXIT_VIOLATION
    rows = model.coproduct_table(args.k, args.mode, args.convention)
    out.write((table_as_json(rows) if args.format == "json" else table_as_text(rows)) + "\n")
    return EXIT_OK


def cmd_sphere_check(args, out) -> int:
    model = _sphere_model(args)
    ring = model.ring
    signs = SignConvention(args.side, args.shift)
    lam = model.coproduct_operator("closed")
    mu = model.product_operator()
    if args.identity == "sullivan":
        report = check_sullivan(mu, lam, model.pair_window(args.k), ring, signs)
    elif args.identity == "coassoc":
        rule = epsilon_rule(model.n) if args.eps else None
        report = check_coassociativity(lam, model.window(args.k), rule, ring, signs)
    elif args.identity == "cocomm":
        report = check_cocommutativity(lam, model.window(args.k), ring, signs)
    else:
        report = check_assoc_comm_unit(mu, model.unit, model.window(args.k // 3), ring, signs)
    out.write((report.to_json() if args.format == "json" else report.to_table()) + "\n")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_sphere_sweep(args, out) -> int:
    ring = ring_from_name(args.field or _default_field("Q"))
    sweep = sweep_conventions(args.k, ring)
    diag = structure_diagnostics(args.k, ring)
    if args.format == "json":
        out.write(_dump({"field": ring.name, "pinned": PINNED_CONVENTION, "conventions": sweep,
                         "diagnostics": diag}) + "\n")
        return EXIT_OK
    out.write(f"field {ring.name}, k <= {args.k}, pinned convention: {PINNED_CONVENTION}\n")
    out.write(f"{'convention':<12} {'recursion=closed':<17} {'sign-only':<10} sullivan violations\n")
    for cid, row in sweep.items():
        out.write(f"{cid:<12} {str(row['recursion_matches_closed']):<17} "
                  f"{str(row['mismatches_are_global_signs']):<10} "
                  f"{row['sullivan_violations']}/{row['sullivan_checked']}\n")
    for name, row in diag.items():
        out.write(f"{name:<28} {row['violations']}/{row['checked']} violations\n")
    return EXIT_OK


# -- chain complexes

def _complex(args, data=None) -> chains.ChainComplex:
    data = data if data is not None else _load_json(args.file)
    ring = ring_from_name(args.field) if getattr(args, "field", None) else None
    return chains.complex_from_dict(data, ring)[0]


def cmd_chain_homology(args, out) -> int:
    C = _complex(args)
    H = chains.homology(C)
    if args.format == "json":
        out.write(_dump({"ring": C.ring.name, "homology": {str(k): g.as_dict() for k, g in H.items()}}) + "\n")
    else:
        out.write(chains.format_homology(H) + "\n")
    return EXIT_OK


def cmd_chain_validate(args, out) -> int:
    data = _load_json(args.file)
    C, filt = chains.complex_from_dict(data, ring_from_name(args.field) if args.field else None)
    if filt is not None:
        chains.FilteredChainComplex(C, filt, strict=not args.weak)
    out.write(_dump(C.to_dict(filt)) + "\n")
    return EXIT_OK


def cmd_chain_reduced(args, out) -> int:
    C = _complex(args)
    dp = chains.DistinguishedPoint(args.point, args.chi)
    R = chains.reduced_complex(C, dp)
    cmp = chains.compare_reduced(C, dp)
    if args.format == "json":
        out.write(_dump({"reduced_complex": R.to_dict(), "comparison": cmp.as_dict()}) + "\n")
    else:
        out.write(f"reduced homology (χ = {args.chi}, point {args.point}, ring {C.ring.name}):\n")
        out.write(chains.format_homology(cmp.reduced) + "\n")
        if not cmp.hypothesis_holds:
            out.write(f"note: {cmp.note}\n")
        else:
            out.write("quotient description: " + ("EQUAL" if cmp.equal else "DIFFERENT") + "\n")
    return EXIT_VIOLATION if cmp.hypothesis_holds and not cmp.equal else EXIT_OK


def _source_target(args, data):
    ring = ring_from_name(args.field) if getattr(args, "field", None) else None
    if "complex" in data:
        S = chains.complex_from_dict(data["complex"], ring)
        return S, S
    try:
        return chains.complex_from_dict(data["source"], ring), chains.complex_from_dict(data["target"], ring)
    except KeyError:
        raise InputError("expected 'complex' or 'source' and 'target'") from None


def cmd_chain_verify_homotopy(args, out) -> int:
    data = _load_json(args.file)
    (S, _), (T, _) = _source_target(args, data)
    try:
        F, G, H = (chains.ChainMapData.from_dict(data[k]) for k in ("F", "G", "H"))
    except KeyError as exc:
        raise InputError(f"missing map {exc}") from None
    report = chains.verify_homotopy(F, G, H, S, T)
    out.write((report.to_json() if args.format == "json" else report.to_table()) + "\n")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def cmd_chain_verify_map(args, out) -> int:
    data = _load_json(args.file)
    (S, _), (T, _) = _source_target(args, data)
    if "F" not in data:
        raise InputError("missing map 'F'")
    report = chains.verify_chain_map(chains.ChainMapData.from_dict(data["F"]), S, T)
    out.write((report.to_json() if args.format == "json" else report.to_table()) + "\n")
    return EXIT_OK if report.ok else EXIT_VIOLATION


def _filtered(pair, strict: bool) -> chains.FilteredChainComplex:
    C, filt = pair
    if filt is None:
        raise InputError("complex has no filtration values")
    return chains.FilteredChainComplex(C, filt, strict)


def cmd_filtered_invert(args, out) -> int:
    data = _load_json(args.file)
    s, t = _source_target(args, data)
    S, T = _filtered(s, not args.weak), _filtered(t, not args.weak)
    if "map" not in data:
        raise InputError("missing 'map'")
    F = chains.ChainMapData.from_dict(data["map"])
    inv = chains.invert_upper_triangular(F, S, T)
    ok = (chains.is_identity(chains.compose_maps(inv, F, S.complex, T.complex, S.complex), S.complex)
          and chains.is_identity(chains.compose_maps(F, inv, T.complex, S.complex, T.complex), T.complex))
    if args.format == "json":
        out.write(_dump({"inverse": inv.to_dict(), "two_sided": ok}) + "\n")
    else:
        for k, m in sorted(inv.matrices.items()):
            out.write(f"degree {k}:\n")
            for row in m.tolist():
                out.write("  " + " ".join(f"{x:>4}" for x in row) + "\n")
        out.write("two-sided inverse: " + ("yes" if ok else "NO") + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_filtered_window(args, out) -> int:
    data = _load_json(args.file)
    C = _filtered(chains.complex_from_dict(data, ring_from_name(args.field) if args.field else None), not args.weak)
    H = chains.filtration_window_homology(C, args.a, args.b)
    if args.format == "json":
        out.write(_dump({"a": args.a, "b": args.b, "homology": {str(k): g.as_dict() for k, g in H.items()}}) + "\n")
    else:
        out.write(f"window ({args.a}, {args.b}]\n" + chains.format_homology(H) + "\n")
    return EXIT_OK


# -- local systems

def _descriptor_and_components(data):
    if "descriptor" not in data:
        raise InputError("missing 'descriptor'")
    M = localsys.descriptor_from_dict(data["descriptor"])
    cm = (localsys.ComponentModel.from_dict(data["components"]) if "components" in data
          else localsys.orientation_components())
    return M, cm


def _system(entry, M, cm) -> localsys.LocalSystemSpec:
    if isinstance(entry, str):
        if entry.startswith("tau:"):
            return localsys.make_tau(M, [int(x) for x in entry[4:].split(",")], cm)
        try:
            return localsys.BUILDERS[entry](M, cm)
        except KeyError:
            raise InputError(f"unknown local system {entry!r}; known: {sorted(localsys.BUILDERS)}") from None
    entry = dict(entry)
    entry.setdefault("descriptor", M.as_dict())
    entry.setdefault("components", cm.as_dict())
    return localsys.LocalSystemSpec.from_dict(entry)


def _report_system(nu, out, fmt: str) -> int:
    verdict = localsys.is_compatible(nu)
    if fmt == "json":
        out.write(_dump({"spec": nu.as_dict(), "classification": localsys.classify(nu),
                         "compatible": verdict.ok, "reason": verdict.reason}) + "\n")
    else:
        out.write(f"degree {nu.degree}\n")
        for c, a, b in nu.coefficients:
            out.write(f"  component {c}: a = {list(a)}, b = {list(b)}\n")
        out.write(("compatible with products" if verdict.ok else f"NOT compatible: {verdict.reason}") + "\n")
    return EXIT_OK


def cmd_localsys_build(args, out) -> int:
    data = _load_json(args.file)
    M, cm = _descriptor_and_components(data)
    if "system" not in data:
        raise InputError("missing 'system'")
    return _report_system(_system(data["system"], M, cm), out, args.format)


def cmd_localsys_tensor(args, out) -> int:
    data = _load_json(args.file)
    M, cm = _descriptor_and_components(data)
    factors = data.get("factors")
    if not factors:
        raise InputError("missing 'factors'")
    nu = localsys.trivial(M, cm)
    for f in factors:
        nu = localsys.tensor(nu, _system(f, M, cm))
    return _report_system(nu, out, args.format)


def cmd_localsys_compat(args, out) -> int:
    data = _load_json(args.file)
    if "system" in data or "coefficients" not in data:
        M, cm = _descriptor_and_components(data)
        nu = _system(data.get("system", "trivial"), M, cm)
    else:
        nu = localsys.LocalSystemSpec.from_dict(data)
    _report_system(nu, out, args.format)
    return EXIT_OK if localsys.is_compatible(nu) else EXIT_VIOLATION


# -- annuli

def _annulus(args) -> annuli.Annulus:
    return annuli.Annulus(annuli.parse_circle(args.outer), annuli.parse_circle(args.inner))


def cmd_annulus_modulus(args, out) -> int:
    R = annuli.modulus(_annulus(args))
    out.write((_dump({"R": R}) if args.format == "json" else f"R = {R:.12g}") + "\n")
    return EXIT_OK


def cmd_annulus_normalize(args, out) -> int:
    phi, R = annuli.normalize(_annulus(args))
    if args.format == "json":
        out.write(_dump({"R": R, "map": phi.as_dict()}) + "\n")
    else:
        out.write(f"R = {R:.12g}\n")
        for k in "abcd":
            out.write(f"{k} = {getattr(phi, k):.12g}\n")
    return EXIT_OK


def cmd_annulus_foliate(args, out) -> int:
    F = annuli.canonical_foliations(_annulus(args), args.radial, args.circular)
    res = annuli.orthogonality_residuals(F)
    svg = annuli.foliation_svg(F)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(svg)
    elif args.format == "svg":
        out.write(svg)
        return EXIT_OK if res.max() < args.tol else EXIT_VIOLATION
    ok = res.max() < args.tol
    if args.format == "json":
        out.write(_dump({"R": F.R, "crossings": len(res), "max_orthogonality_residual": float(res.max()),
                         "svg": args.svg}) + "\n")
    else:
        out.write(f"R = {F.R:.12g}; {len(F.radial)} radial and {len(F.circular)} circular leaves\n")
        out.write(f"orthogonality residual max = {res.max():.3g} at {len(res)} crossings "
                  f"({'PASS' if ok else 'FAIL'})\n")
        if args.svg:
            out.write(f"wrote {args.svg}\n")
    return EXIT_OK if ok else EXIT_VIOLATION


# -- profiles

def cmd_profile_verify(args, out) -> int:
    params = profiles.ProfileParams(args.mu, args.eps, args.delta, args.order, args.rmax)
    pr = profiles.build_profile(params)
    rep = profiles.verify_bounds(pr, args.samples)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(profiles.profile_csv(pr, args.samples))
    if args.format == "json":
        out.write(_dump({"ok": rep.ok, "max_gap": rep.max_gap, "min_gap": rep.min_gap, "bound": rep.bound,
                         "min_d2h_inside": rep.min_d2h_inside, "samples": rep.samples,
                         "gap_violations": rep.gap_violations[:20]}) + "\n")
    elif args.format == "csv":
        out.write(profiles.profile_csv(pr, args.samples))
    else:
        out.write(rep.summary() + "\n")
    return EXIT_OK if rep.ok else EXIT_VIOLATION


# -- parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="looptop", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="group", required=True)

    def fmt(parser, choices=("table", "json"), default="table"):
        parser.add_argument("--format", choices=choices, default=default)

    # sphere
    sp = sub.add_parser("sphere", help="the Λ(A, U) model of the 3-sphere loop homology")
    ssub = sp.add_subparsers(dest="cmd", required=True)
    co = ssub.add_parser("coproduct", help="coproduct tables")
    co.add_argument("--k", type=int, required=True, help="largest U-exponent shown")
    co.add_argument("--field", help="F2 | Q | Z | Fp (default: $LOOPTOP_FIELD or F2)")
    co.add_argument("--mode", choices=("closed", "recursive", "compare"), default="closed")
    co.add_argument("--convention", choices=sorted(CONVENTIONS), default=PINNED_CONVENTION)
    co.add_argument("--truncation", type=int)
    fmt(co)
    co.set_defaults(func=cmd_sphere_coproduct)
    ch = ssub.add_parser("check", help="verify an identity on a finite window")
    ch.add_argument("identity", choices=("sullivan", "coassoc", "cocomm", "assoc"))
    ch.add_argument("--k", type=int, required=True, help="window: exponents (pairs: total exponent) <= k")
    ch.add_argument("--field")
    ch.add_argument("--side", choices=("right", "left", "none"), default=CONVENTIONS[PINNED_CONVENTION].side,
                    help="Koszul sign side (default: the pinned convention)")
    ch.add_argument("--shift", type=int, default=0, help="evaluate signs in degrees shifted by this amount")
    ch.add_argument("--eps", action="store_true", help="apply the ε sign correction (coassoc only)")
    ch.add_argument("--truncation", type=int)
    fmt(ch)
    ch.set_defaults(func=cmd_sphere_check)
    sw = ssub.add_parser("sweep", help="sign-convention sweep and structure diagnostics")
    sw.add_argument("--k", type=int, default=10)
    sw.add_argument("--field")
    fmt(sw)
    sw.set_defaults(func=cmd_sphere_sweep)

    # chain
    cp = sub.add_parser("chain", help="finite chain complexes (JSON files)")
    csub = cp.add_subparsers(dest="cmd", required=True)
    for name, func, hlp in (("homology", cmd_chain_homology, "homology (ranks and torsion)"),
                            ("validate", cmd_chain_validate, "validate and echo canonical JSON"),
                            ("verify-homotopy", cmd_chain_verify_homotopy, "check ∂H + H∂ = F - G"),
                            ("verify-map", cmd_chain_verify_map, "check ∂F = (-1)^deg F · F∂")):
        c = csub.add_parser(name, help=hlp)
        c.add_argument("file")
        c.add_argument("--field", help="override the file's ring")
        if name == "validate":
            c.add_argument("--weak", action="store_true", help="allow ∂ to keep the filtration value")
        fmt(c)
        c.set_defaults(func=func)
    rd = csub.add_parser("reduced", help="reduced complex C / χ·q0 and comparison with H(C)/χ[q0]")
    rd.add_argument("file")
    rd.add_argument("--chi", type=int, required=True)
    rd.add_argument("--point", required=True)
    rd.add_argument("--field")
    fmt(rd)
    rd.set_defaults(func=cmd_chain_reduced)

    # filtered
    fp = sub.add_parser("filtered", help="filtered complexes")
    fsub = fp.add_subparsers(dest="cmd", required=True)
    inv = fsub.add_parser("invert", help="invert an upper triangular filtered map")
    inv.add_argument("file")
    inv.add_argument("--field")
    inv.add_argument("--weak", action="store_true")
    fmt(inv)
    inv.set_defaults(func=cmd_filtered_invert)
    win = fsub.add_parser("window", help="homology of the filtration window (a, b]")
    win.add_argument("file")
    win.add_argument("--a", type=float, required=True)
    win.add_argument("--b", type=float, required=True)
    win.add_argument("--field")
    win.add_argument("--weak", action="store_true")
    fmt(win)
    win.set_defaults(func=cmd_filtered_window)

    # local systems
    lp = sub.add_parser("localsys", help="Z/2 local systems on the loop space")
    lsub = lp.add_subparsers(dest="cmd", required=True)
    for name, func in (("build", cmd_localsys_build), ("tensor", cmd_localsys_tensor),
                       ("compat", cmd_localsys_compat)):
        c = lsub.add_parser(name)
        c.add_argument("file")
        fmt(c)
        c.set_defaults(func=func)

    # annuli
    ap = sub.add_parser("annulus", help="conformal annuli (circles as cx,cy,r)")
    asub = ap.add_subparsers(dest="cmd", required=True)
    for name, func in (("modulus", cmd_annulus_modulus), ("normalize", cmd_annulus_normalize),
                       ("foliate", cmd_annulus_foliate)):
        c = asub.add_parser(name)
        c.add_argument("--outer", required=True)
        c.add_argument("--inner", required=True)
        if name == "foliate":
            c.add_argument("--radial", type=int, default=16)
            c.add_argument("--circular", type=int, default=8)
            c.add_argument("--svg", help="write the figure here")
            c.add_argument("--tol", type=float, default=1e-6)
            fmt(c, ("table", "json", "svg"))
        else:
            fmt(c)
        c.set_defaults(func=func)

    # profiles
    pp = sub.add_parser("profile", help="Hamiltonian profile h and its action bounds")
    psub = pp.add_subparsers(dest="cmd", required=True)
    pv = psub.add_parser("verify", help="check 0 <= r h' - h - h' <= μδ and h'' > 0 on (1, 1+δ)",
                         epilog="CSV columns: r, h, dh (= h'), A (= r h' - h), gap (= A - h')")
    pv.add_argument("--mu", type=float, required=True)
    pv.add_argument("--eps", type=float, required=True)
    pv.add_argument("--delta", type=float, required=True)
    pv.add_argument("--rmax", type=float, default=3.0)
    pv.add_argument("--samples", type=int, default=10_000)
    pv.add_argument("--order", type=int, default=5, help="odd smoothstep degree >= 5")
    pv.add_argument("--csv", help="write the sampled table here")
    fmt(pv, ("table", "json", "csv"))
    pv.set_defaults(func=cmd_profile_verify)
    return p


def run(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except (InputError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(f"looptop: error: {msg}\n")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
