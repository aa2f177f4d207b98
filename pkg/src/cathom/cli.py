"""Command-line front end.

Commands: validate, chains, ss, ext, family, tor, assembly.
Exit codes: 0 ok, 1 validation failure, 2 convergence/exactness mismatch,
3 unbounded chains, 4 input error.  PCHAIN_CACHE overrides --cache-dir.
Output is deterministic: identical inputs and config produce byte-identical
documents at any --jobs value (the jobs count never enters the output).
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .cache import DiskCache, cached_free_resolution
from .catmod import CO, CONTRA, full_subcategory
from .e1data import verify_e1
from .extpages import ext_pages
from .fincat import UnboundedChains, chain_biset, enumerate_chains
from .fpmod import FPModule
from .groups import check_M, check_NM, cofinal_inclusion_check, reduce_family
from .resolve import assembly_tor, tor
from .rings import ring_from_tag
from .serialize import (
    ParseError,
    category_to_json,
    content_hash,
    family_to_json,
    load_bundle,
    module_to_json,
)
from .spectral import build_filtered_complex, converge_and_compare, spectral_pages

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_MISMATCH = 2
EXIT_UNBOUNDED = 3
EXIT_INPUT = 4


def _emit(doc, args):
    text = json.dumps(doc, sort_keys=True, indent=2)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_table(lines, args):
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cache_from(args) -> DiskCache | None:
    directory = os.environ.get("PCHAIN_CACHE") or args.cache_dir
    return DiskCache(directory) if directory else None


def _pretty(m: FPModule) -> str:
    return m.pretty()


def cmd_validate(args) -> int:
    violations = []
    for path in args.bundle:
        try:
            ws = load_bundle(path, strict=False)
        except ParseError as e:
            print(f"{path}: PARSE ERROR: {e}", file=sys.stderr)
            return EXIT_INPUT
        violations.extend(f"{path}: {v}" for v in ws.violations)
        if not ws.violations:
            print(f"{path}: category ok, {len(ws.modules)} modules, "
                  f"{len(ws.groups)} groups, {len(ws.families)} families, "
                  f"hash {ws.digest[:12]}")
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


def cmd_chains(args) -> int:
    try:
        ws = load_bundle(args.bundle)
    except ParseError as e:
        print(f"PARSE ERROR: {e}", file=sys.stderr)
        return EXIT_INPUT
    cat = ws.category
    try:
        chains = enumerate_chains(cat, args.pmax)
    except UnboundedChains as e:
        print(f"UNBOUNDED: {e}", file=sys.stderr)
        return EXIT_UNBOUNDED
    doc = {"category": cat.name, "counts": {}, "chains": {}}
    for p in sorted(chains):
        doc["counts"][str(p)] = len(chains[p])
        entries = []
        for ch in chains[p]:
            size = chain_biset(cat, ch).size() if p >= 1 else 1
            entries.append({"classes": list(ch.reps), "biset_size": size})
        doc["chains"][str(p)] = entries
    if args.format == "table":
        lines = [f"chains of {cat.name}:"]
        for p in sorted(chains):
            lines.append(f"  p={p}: {len(chains[p])}")
            for e in doc["chains"][str(p)]:
                lines.append(f"    {' < '.join(e['classes'])}  |S| = {e['biset_size']}")
        _emit_table(lines, args)
    else:
        _emit(doc, args)
    return EXIT_OK


def _load_mn(args, want_n_variance):
    ws = load_bundle(args.bundle)
    if args.module_m not in ws.modules:
        raise ParseError(f"module {args.module_m!r} not in bundle")
    if args.module_n not in ws.modules:
        raise ParseError(f"module {args.module_n!r} not in bundle")
    M = ws.modules[args.module_m]
    N = ws.modules[args.module_n]
    if M.variance != CONTRA:
        raise ParseError("M must be contravariant")
    if N.variance != want_n_variance:
        raise ParseError(f"N must be {want_n_variance}variant")
    if args.ring:
        ring = ring_from_tag(args.ring)
        if M.ring != ring or N.ring != ring:
            raise ParseError(
                f"bundle modules are over {M.ring}/{N.ring}, not {args.ring}"
            )
    return ws, M, N


def cmd_ss(args) -> int:
    try:
        ws, M, N = _load_mn(args, CO)
    except ParseError as e:
        print(f"INPUT ERROR: {e}", file=sys.stderr)
        return EXIT_INPUT
    cache = _cache_from(args)
    q_max = args.qmax if args.qmax is not None else args.nmax + 1
    if q_max < args.nmax + 1:
        print(f"INPUT ERROR: qmax must be at least nmax + 1 = {args.nmax + 1} "
              "for the convergence band", file=sys.stderr)
        return EXIT_INPUT
    try:
        from .fincat import chain_bound

        bound = chain_bound(ws.category)
        if args.pmax is not None and args.pmax < bound:
            print(f"INPUT ERROR: pmax must cover the chain bound {bound} "
                  "when convergence is requested", file=sys.stderr)
            return EXIT_INPUT
        Q = cached_free_resolution(
            N, q_max, cache, cat_json=category_to_json(ws.category),
            module_json=module_to_json(N),
        )
        fc = build_filtered_complex(M, N, p_max=args.pmax, q_max=q_max,
                                    Q=Q, jobs=args.jobs)
        pages = spectral_pages(fc, args.rmax)
        report = converge_and_compare(M, N, args.nmax, fc=fc)
    except UnboundedChains as e:
        print(f"UNBOUNDED: {e}", file=sys.stderr)
        return EXIT_UNBOUNDED
    doc = {
        "bundle_hash": ws.digest,
        "M": args.module_m,
        "N": args.module_n,
        "config": {"nmax": args.nmax, "pmax": fc.p_max, "qmax": fc.q_max,
                   "rmax": args.rmax},
        "pages": [pg.to_json() for pg in pages],
        "oracle": {str(d["m"]): d["oracle"] for d in report.degrees},
        "convergence": report.to_json(),
    }
    if args.format == "table":
        lines = [f"E^infty of ({args.module_m}, {args.module_n}); "
                 f"certified band {report.band}"]
        einf = pages[-1]
        for (p, q) in sorted(einf.entries):
            m = einf.entries[(p, q)].module
            if not m.is_zero():
                lines.append(f"  E({p},{q}) = {m.pretty()}")
        for d in report.degrees:
            lines.append(f"  Tor_{d['m']} = {d['oracle']} (total {d['total']}) "
                         f"{'ok' if d['match'] else 'MISMATCH'}")
        lines.append("all-match" if report.all_match else "MISMATCH")
        _emit_table(lines, args)
    else:
        _emit(doc, args)
    return EXIT_OK if report.all_match else EXIT_MISMATCH


def cmd_ext(args) -> int:
    try:
        ws, M, N = _load_mn(args, CONTRA)
    except ParseError as e:
        print(f"INPUT ERROR: {e}", file=sys.stderr)
        return EXIT_INPUT
    q_max = args.qmax if args.qmax is not None else args.nmax + 1
    try:
        pages, report = ext_pages(M, N, p_max=args.pmax, q_max=q_max,
                                  r_max=args.rmax, n_max=args.nmax)
    except UnboundedChains as e:
        print(f"UNBOUNDED: {e}", file=sys.stderr)
        return EXIT_UNBOUNDED
    doc = {
        "bundle_hash": ws.digest,
        "M": args.module_m,
        "N": args.module_n,
        "config": {"nmax": args.nmax, "qmax": q_max, "rmax": args.rmax},
        "pages": [pg.to_json() for pg in pages],
        "convergence": report.to_json(),
    }
    _emit(doc, args)
    return EXIT_OK if report.all_match else EXIT_MISMATCH


def cmd_tor(args) -> int:
    try:
        ws, M, N = _load_mn(args, CO)
    except ParseError as e:
        print(f"INPUT ERROR: {e}", file=sys.stderr)
        return EXIT_INPUT
    groups = tor(M, N, args.nmax)
    doc = {
        "bundle_hash": ws.digest,
        "M": args.module_m,
        "N": args.module_n,
        "tor": {str(q): groups[q].pretty() for q in range(args.nmax + 1)},
    }
    if args.format == "table":
        _emit_table([f"Tor_{q} = {groups[q].pretty()}" for q in range(args.nmax + 1)], args)
    else:
        _emit(doc, args)
    return EXIT_OK


def cmd_family(args) -> int:
    try:
        ws = load_bundle(args.bundle)
        if args.family not in ws.families:
            raise ParseError(f"family {args.family!r} not in bundle")
        gname, fam = ws.families[args.family]
        G = ws.groups[gname]
        if args.subfamily:
            if args.subfamily not in ws.families:
                raise ParseError(f"family {args.subfamily!r} not in bundle")
            gname2, sub = ws.families[args.subfamily]
            if gname2 != gname:
                raise ParseError("subfamily belongs to a different group")
        else:
            sub = reduce_family(fam)
    except ParseError as e:
        print(f"INPUT ERROR: {e}", file=sys.stderr)
        return EXIT_INPUT
    try:
        ok, witnesses = cofinal_inclusion_check(sub, fam)
    except ValueError as e:
        print(f"INPUT ERROR: {e}", file=sys.stderr)
        return EXIT_INPUT
    doc = {
        "group": gname,
        "family_size": len(fam),
        "reduced": family_to_json(sub),
        "cofinal": ok,
        "M": check_M(G, fam),
        "NM": check_NM(G, fam),
    }
    if ok:
        doc["witnesses"] = {
            str(sorted(H)): sorted(K) for H, K in witnesses.items()
        }
    else:
        doc["counterexample"] = sorted(witnesses["counterexample"])
    if args.assembly:
        from .groups import orbit_category
        from .catmod import CatModule

        ring = ring_from_tag(args.ring or "Z")
        big = orbit_category(G, fam)
        keep = [o for o in big.objects if big.subgroup_of[o] in sub._set]
        smallcat, inc = full_subcategory(big, keep)
        N = CatModule.constant(big, ring, CO)
        res = assembly_tor(inc, N, args.nmax)
        doc["assembly"] = [
            {"q": q, "source": res.source[q].pretty(),
             "target": res.target[q].pretty(), "iso": res.iso[q]}
            for q in range(args.nmax + 1)
        ]
    _emit(doc, args)
    return EXIT_OK


def cmd_assembly(args) -> int:
    try:
        ws = load_bundle(args.bundle)
        if args.module_n not in ws.modules:
            raise ParseError(f"module {args.module_n!r} not in bundle")
        N = ws.modules[args.module_n]
        if N.variance != CO:
            raise ParseError("assembly needs a covariant coefficient module")
        objs = args.objects.split(",")
        for o in objs:
            if o not in ws.category.obj_index:
                raise ParseError(f"object {o!r} not in the category")
    except ParseError as e:
        print(f"INPUT ERROR: {e}", file=sys.stderr)
        return EXIT_INPUT
    sub, inc = full_subcategory(ws.category, objs)
    res = assembly_tor(inc, N, args.nmax)
    doc = {
        "bundle_hash": ws.digest,
        "subcategory": objs,
        "N": args.module_n,
        "maps": [
            {"q": q, "source": res.source[q].pretty(),
             "target": res.target[q].pretty(),
             "matrix": [[res.maps[q].ring.entry_to_json(x) for x in row]
                        for row in res.maps[q].data],
             "iso": res.iso[q]}
            for q in range(args.nmax + 1)
        ],
    }
    _emit(doc, args)
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="cathom",
        description="Exact homological algebra over finite categories",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, module_args=True):
        p.add_argument("--ring", default=None, help="Z, Q or Fp:P")
        p.add_argument("--nmax", type=int, default=3)
        p.add_argument("--pmax", type=int, default=None)
        p.add_argument("--qmax", type=int, default=None)
        p.add_argument("--rmax", type=int, default=None)
        p.add_argument("--jobs", type=int, default=1)
        p.add_argument("--cache-dir", default=None)
        p.add_argument("--format", choices=["json", "table"], default="json")
        p.add_argument("--out", default=None, help="write output to a file")

    pv = sub.add_parser("validate", help="validate bundles")
    pv.add_argument("bundle", nargs="+")
    pv.set_defaults(fn=cmd_validate)

    pc = sub.add_parser("chains", help="list chains and biset sizes")
    pc.add_argument("bundle")
    common(pc)
    pc.set_defaults(fn=cmd_chains)

    ps = sub.add_parser("ss", help="spectral sequence pages and convergence")
    ps.add_argument("bundle")
    ps.add_argument("-M", dest="module_m", required=True)
    ps.add_argument("-N", dest="module_n", required=True)
    common(ps)
    ps.set_defaults(fn=cmd_ss)

    pe = sub.add_parser("ext", help="cohomology pages and convergence")
    pe.add_argument("bundle")
    pe.add_argument("-M", dest="module_m", required=True)
    pe.add_argument("-N", dest="module_n", required=True)
    common(pe)
    pe.set_defaults(fn=cmd_ext)

    pt = sub.add_parser("tor", help="the Tor oracle")
    pt.add_argument("bundle")
    pt.add_argument("-M", dest="module_m", required=True)
    pt.add_argument("-N", dest="module_n", required=True)
    common(pt)
    pt.set_defaults(fn=cmd_tor)

    pf = sub.add_parser("family", help="cofinality, reduction and (M)/(NM)")
    pf.add_argument("bundle")
    pf.add_argument("--family", required=True)
    pf.add_argument("--subfamily", default=None)
    pf.add_argument("--assembly", action="store_true")
    common(pf)
    pf.set_defaults(fn=cmd_family)

    pa = sub.add_parser("assembly", help="assembly maps along a subcategory inclusion")
    pa.add_argument("bundle")
    pa.add_argument("-N", dest="module_n", required=True)
    pa.add_argument("--objects", required=True,
                    help="comma-separated objects of the full subcategory")
    common(pa)
    pa.set_defaults(fn=cmd_assembly)
    return ap


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
