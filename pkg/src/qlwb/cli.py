"""Command-line front end for the variety catalog.

Every subcommand except ``hodge`` takes a catalog entry name; ``qlwb
check`` runs the whole catalog against its recorded expectations and
exits nonzero if anything disagrees.
"""
from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from .pages import build_bloch_ogus_page, gysin_p1, ktau_e2, ktau_profile, \
    ku_mod_m
from .schubert import hodge_middle
from .workbench import (CatalogEntry, check_all, k_rows, load_catalog,
                        make_resolver, report, run_entry)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qlwb",
        description="Weight intervals, spectral-sequence pages, and "
                    "K-groups for the varieties in the catalog.")
    parser.add_argument("--catalog", metavar="DIR", default=None,
                        help="load catalog files from DIR instead of the "
                             "bundled set")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="list the catalog entries")
    p = sub.add_parser("qldim", help="weight interval with certificates")
    p.add_argument("name")
    p = sub.add_parser("e2", help="second-page grid")
    p.add_argument("name")
    p.add_argument("--coeff", default="z", metavar="z|z/m|z/M",
                   help="integral page (z), symbolic mod-m page (z/m), or "
                        "a specific modulus (e.g. z/4)")
    p = sub.add_parser("ktau", help="vanishing profile by total degree")
    p.add_argument("name")
    p.add_argument("--mod", type=int, default=None, metavar="M",
                   help="use a specific modulus instead of symbolic m")
    p = sub.add_parser("ku", help="topological K-theory")
    p.add_argument("name")
    p.add_argument("--mod", type=int, default=None, metavar="M",
                   help="also print KU with mod-M coefficients")
    p = sub.add_parser("gysin", help="cohomology of the associated "
                                     "P^1-bundle of a twist")
    p.add_argument("name")
    p.add_argument("--twist", default=None, metavar="ID",
                   help="Brauer class (default: the entry's only twist)")
    p = sub.add_parser("ktheory", help="algebraic K-groups by degree")
    p.add_argument("name")
    p.add_argument("--n", default="0..4", metavar="A..B",
                   help="degree range (default 0..4)")
    p = sub.add_parser("hodge", help="middle Hodge numbers of a "
                                     "Grassmannian hyperplane section")
    p.add_argument("--gr", required=True, metavar="K,N",
                   help="ambient Grassmannian Gr(K,N)")
    p.add_argument("--codim", type=int, required=True,
                   help="number of hyperplane sections")
    p = sub.add_parser("report", help="full report for one entry")
    p.add_argument("name")
    p.add_argument("--format", default="text", choices=("text", "markdown"))
    p = sub.add_parser("check", help="run every entry against its "
                                     "recorded expectations")
    p.add_argument("--parallel", action="store_true",
                   help="run entries concurrently (same output)")
    return parser


def _entry(catalog: dict, name: str) -> CatalogEntry:
    if name not in catalog:
        near = ", ".join(sorted(catalog))
        raise SystemExit(f"qlwb: no entry {name!r}; known entries: {near}")
    return catalog[name]


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "hodge":
        try:
            k_s, _, n_s = args.gr.partition(",")
            k, n = int(k_s), int(n_s)
        except ValueError:
            raise SystemExit("qlwb: --gr expects K,N (e.g. 2,7)") from None
        row = hodge_middle(k, n, args.codim)
        d = len(row) - 1
        for i, h in enumerate(row):
            print(f"h^{{{i},{d - i}}} = {h}")
        return 0

    catalog = load_catalog(args.catalog)
    if args.command == "list":
        width = max(len(n) for n in catalog)
        for name in sorted(catalog):
            print(f"{name:{width}s}  {catalog[name].title}")
        return 0
    if args.command == "check":
        run = check_all(catalog, parallel=args.parallel)
        print(run.render())
        return 0 if run.ok else 1

    entry = _entry(catalog, args.name)
    v = entry.variety
    resolve = make_resolver(catalog)

    if args.command == "qldim":
        from .decision import combine
        print(combine(v, resolve=resolve).render())
        return 0

    if args.command == "e2":
        page = build_bloch_ogus_page(v)
        coeff = args.coeff.lower()
        if coeff == "z":
            print(page.render())
        elif coeff in ("z/m", "z/"):
            print(ktau_e2(page).render())
        elif coeff.startswith("z/"):
            try:
                m = int(coeff[2:])
            except ValueError:
                raise SystemExit(f"qlwb: bad coefficient {args.coeff!r}") \
                    from None
            print(ktau_e2(page, m).render())
        else:
            raise SystemExit(f"qlwb: bad coefficient {args.coeff!r}")
        return 0

    if args.command == "ktau":
        page = build_bloch_ogus_page(v)
        profile = ktau_profile(ktau_e2(page, args.mod))
        print(profile.render())
        return 0

    if args.command == "ku":
        from .extensions import SplitPolicy
        from .pages import ahss_ku
        even, odd = ahss_ku(v.h_int, SplitPolicy.assume_split())
        if even.resolved is None or odd.resolved is None:
            raise SystemExit(f"qlwb: KU extension of {v.name} not resolved")
        print(f"KU^even = {even.resolved}")
        print(f"KU^odd  = {odd.resolved}")
        if args.mod is not None:
            em, om = ku_mod_m(even.resolved, odd.resolved, args.mod)
            print(f"KU^even (Z/{args.mod}) = {em}")
            print(f"KU^odd  (Z/{args.mod}) = {om}")
        return 0

    if args.command == "gysin":
        if not v.twists:
            raise SystemExit(f"qlwb: {v.name} records no twists")
        tid = args.twist
        if tid is None:
            if len(v.twists) > 1:
                ids = ", ".join(t.brauer_class_id for t in v.twists)
                raise SystemExit(f"qlwb: pick --twist among {ids}")
            tid = v.twists[0].brauer_class_id
        twist = v.twist(tid)
        hp = gysin_p1(v.h_int, dict(twist.cup))
        for i in range(0, 2 * (v.dim + 1) + 1):
            print(f"H^{i}(P) = {hp.group(i)}")
        return 0

    if args.command == "ktheory":
        lo_s, sep, hi_s = args.n.partition("..")
        try:
            lo, hi = (int(lo_s), int(hi_s)) if sep else (int(lo_s),) * 2
        except ValueError:
            raise SystemExit(f"qlwb: bad degree range {args.n!r}") from None
        if lo < 0 or hi < lo:
            raise SystemExit(f"qlwb: bad degree range {args.n!r}")
        from .decision import combine
        qldim = combine(v, resolve=resolve)
        rows = k_rows(entry, qldim.interval[1], range(lo, hi + 1))
        for n in sorted(rows):
            print(f"K_{n} = {rows[n]}")
        return 0

    if args.command == "report":
        print(report(entry, run_entry(entry, resolve), fmt=args.format),
              end="")
        return 0

    raise SystemExit(f"qlwb: unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
