"""Variety catalog: load entries from TOML, run the full toolkit over
them, and diff the results against recorded expectations.

A catalog entry is one file holding the integral cohomology, Hodge
numbers, cycle-theoretic flags, Chow data, semiorthogonal decomposition,
and Brauer twists of one variety, together with the values the tools are
expected to reproduce and a citation for every expected value.  Loading
is strict: malformed files, inconsistent Hodge tables, or expectations
without citations are rejected with the entry and field named.

``run_entry`` exercises one entry (weight interval, spectral-sequence
pages, KU, twisted forms, K-groups) and records one check per recorded
expectation; ``check_all`` runs the whole catalog plus the cross-entry
consistency checks (decision rules against the page pipeline, weight
equality across semiorthogonal decompositions, KU additivity).

>>> cat = load_catalog()
>>> cat["enriques"].variety.dim
2
>>> len(cat) >= 18
True
"""
from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

try:
    import tomllib
except ModuleNotFoundError:  # pragma: no cover - python < 3.11
    import tomli as tomllib

from .decision import (QLResult, combine, qldim_3fold_rc, qldim_4fold_rc,
                       qldim_surface, rule_twisted_enriques_chain)
from .groups import FgAbGroup, GradedAb, subtract_summand
from .ktheory import (assemble_high_kn, component_k_table, k0_filtration,
                      phantom_vanishing)
from .pages import (BigradedPage, KtauProfile, ahss_ku, build_bloch_ogus_page,
                    gysin_p1, ktau_e2, ktau_profile, ku_mod_m)
from .extensions import SplitPolicy
from .schubert import hodge_middle
from .variety import (ChowData, ChowEntry, ComponentRef, Flags, Twist,
                      VarietyData)

__all__ = [
    "CatalogError",
    "CatalogEntry",
    "Check",
    "EntryRun",
    "CatalogRun",
    "load_catalog",
    "make_resolver",
    "run_entry",
    "check_all",
    "k_rows",
    "report",
    "report_section",
]

CATALOG_DIR = Path(__file__).parent / "catalog"

_FLAG_FIELDS = {
    "rationally_connected", "ch0_trivial", "alg_eq_hom_ch1", "n2h5_full",
    "ihc_h4", "ihc_h6", "rational", "stably_rational", "unirational_degree",
    "conic_bundle_base_dim", "k0_to_ku0_surjective",
}
_EXPECTED_KEYS = {"qldim", "ktau", "ku", "ku_mod", "gysin", "e2", "k_table",
                  "twisted"}
_K_TABLE_ROWS = ("0", "odd", "even")


class CatalogError(ValueError):
    """A catalog file that cannot be accepted as data."""


@dataclass(frozen=True)
class CatalogEntry:
    """One loaded catalog file."""
    __slots__ = ("name", "title", "variety", "expected", "citations",
                 "notes", "k_rational_symbol", "gr_section", "path")
    name: str
    title: str
    variety: VarietyData
    expected: Mapping[str, object]
    citations: Mapping[str, tuple[str, ...]]
    notes: tuple[str, ...]
    k_rational_symbol: str
    gr_section: Optional[tuple[int, int, int]]
    path: str


# ---------------------------------------------------------------------------
# loading


def _err(name: str, field_name: str, message: str) -> CatalogError:
    return CatalogError(f"{name}: [{field_name}] {message}")


def _parse_group(name: str, field_name: str, text: object) -> FgAbGroup:
    if not isinstance(text, str):
        raise _err(name, field_name, f"expected a group string, got {text!r}")
    try:
        return FgAbGroup.parse(text)
    except ValueError as exc:
        raise _err(name, field_name, str(exc)) from None


def _parse_pq_key(name: str, field_name: str, key: str) -> tuple[int, int]:
    parts = key.split(",")
    if len(parts) != 2:
        raise _err(name, field_name, f"key {key!r} is not of the form 'p,q'")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise _err(name, field_name, f"key {key!r} is not a pair of integers") \
            from None


def _parse_hodge(name: str, raw: Mapping[str, object],
                 dim: int) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    for key, value in raw.items():
        p, q = _parse_pq_key(name, "hodge", key)
        if not (0 <= p and 0 <= q and p + q <= 2 * dim):
            raise _err(name, "hodge", f"({p},{q}) outside the diamond")
        if not isinstance(value, int) or value < 0:
            raise _err(name, "hodge", f"h^{{{p},{q}}} = {value!r} is not a "
                                      "nonnegative integer")
        for spot in ((p, q), (q, p)):
            if spot in out and out[spot] != value:
                raise _err(name, "hodge",
                           f"h^{{{spot[0]},{spot[1]}}} recorded twice with "
                           f"different values {out[spot]} and {value}")
            out[spot] = value
    return out


def _parse_flags(name: str, raw: Mapping[str, object]) -> Flags:
    unknown = set(raw) - _FLAG_FIELDS
    if unknown:
        raise _err(name, "flags", f"unknown flag(s) {sorted(unknown)}")
    for key, value in raw.items():
        want_int = key in ("unirational_degree", "conic_bundle_base_dim")
        if want_int and not isinstance(value, int):
            raise _err(name, "flags", f"{key} must be an integer")
        if not want_int and not isinstance(value, bool):
            raise _err(name, "flags", f"{key} must be a boolean")
    return Flags(**raw)


def _parse_sod(name: str, raw: Sequence[object]) -> tuple[ComponentRef, ...]:
    """Expand the compact component strings.

    >>> [str(c) for c in _parse_sod("x", ["curve:2", "exceptional:2"])]
    ['curve(g=2)', 'exceptional', 'exceptional']
    """
    comps: list[ComponentRef] = []
    for item in raw:
        if not isinstance(item, str):
            raise _err(name, "sod", f"component {item!r} is not a string")
        kind, _, rest = item.partition(":")
        if kind == "exceptional":
            try:
                count = int(rest) if rest else 1
            except ValueError:
                raise _err(name, "sod", f"bad exceptional count in {item!r}") \
                    from None
            if count < 1:
                raise _err(name, "sod", f"bad exceptional count in {item!r}")
            comps.extend(ComponentRef.exceptional() for _ in range(count))
        elif kind == "curve":
            try:
                genus = int(rest)
            except ValueError:
                raise _err(name, "sod", f"bad genus in {item!r}") from None
            comps.append(ComponentRef.curve(genus))
        elif kind == "phantom":
            comps.append(ComponentRef.phantom())
        elif kind == "opaque":
            lo_s, sep, hi_s = rest.partition("..")
            if not sep:
                raise _err(name, "sod", f"opaque bounds missing in {item!r}")
            try:
                comps.append(ComponentRef.opaque(int(lo_s), int(hi_s)))
            except ValueError:
                raise _err(name, "sod", f"bad opaque bounds in {item!r}") \
                    from None
        elif kind == "variety":
            if not rest:
                raise _err(name, "sod", f"missing variety name in {item!r}")
            comps.append(ComponentRef.variety(rest))
        elif kind == "twisted":
            sub, sep, cls = rest.partition(":")
            if not sep or not sub or not cls:
                raise _err(name, "sod",
                           f"twisted component {item!r} needs name:class")
            comps.append(ComponentRef.twisted_variety(sub, cls))
        else:
            raise _err(name, "sod", f"unknown component kind in {item!r}")
    return tuple(comps)


def _parse_chow(name: str, raw: Mapping[str, object],
                dim: int) -> ChowData:
    entries: dict[int, ChowEntry] = {}
    for key, body in raw.items():
        try:
            codim = int(key)
        except ValueError:
            raise _err(name, "chow", f"codimension key {key!r} is not an "
                                     "integer") from None
        if not 0 <= codim <= dim:
            raise _err(name, "chow", f"codimension {codim} outside 0..{dim}")
        if not isinstance(body, Mapping):
            raise _err(name, "chow", f"entry {codim} is not a table")
        allowed = {"free", "torsion", "divisible", "divisible_torsion_free",
                   "mod_alg", "certificate"}
        unknown = set(body) - allowed
        if unknown:
            raise _err(name, "chow",
                       f"entry {codim}: unknown key(s) {sorted(unknown)}")
        kwargs: dict[str, object] = {}
        if "free" in body:
            kwargs["free_rank"] = body["free"]
        if "torsion" in body:
            kwargs["torsion"] = _parse_group(name, "chow", body["torsion"])
        if "divisible" in body:
            kwargs["divisible"] = tuple(body["divisible"])
        if "divisible_torsion_free" in body:
            kwargs["divisible_torsion_free"] = body["divisible_torsion_free"]
        if "mod_alg" in body:
            kwargs["mod_alg"] = _parse_group(name, "chow", body["mod_alg"])
        if "certificate" in body:
            kwargs["certificate"] = body["certificate"]
        entries[codim] = ChowEntry(**kwargs)
    return ChowData(entries)


def _parse_twists(name: str, raw: Mapping[str, object]) -> tuple[Twist, ...]:
    twists = []
    for tid, body in raw.items():
        if not isinstance(body, Mapping) or "index" not in body:
            raise _err(name, "twists", f"twist {tid!r} needs an index")
        cup: dict[int, list[list[int]]] = {}
        for deg, matrix in body.get("cup", {}).items():
            try:
                cup[int(deg)] = [list(row) for row in matrix]
            except (ValueError, TypeError):
                raise _err(name, "twists",
                           f"twist {tid!r}: bad cup matrix at degree "
                           f"{deg!r}") from None
        twists.append(Twist(tid, body["index"], cup))
    return tuple(twists)


def _check_interval(name: str, field_name: str, value: object,
                    dim: int) -> tuple[int, int]:
    if (not isinstance(value, Sequence) or len(value) != 2 or
            not all(isinstance(x, int) for x in value)):
        raise _err(name, field_name, f"{value!r} is not a pair of integers")
    lo, hi = value
    if not 0 <= lo <= hi <= dim:
        raise _err(name, field_name,
                   f"interval [{lo},{hi}] is not inside [0,{dim}]")
    return lo, hi


def _check_expected(name: str, raw: Mapping[str, object], dim: int,
                    twist_ids: set[str]) -> dict[str, object]:
    unknown = set(raw) - _EXPECTED_KEYS
    if unknown:
        raise _err(name, "expected", f"unknown key(s) {sorted(unknown)}")
    if "qldim" not in raw:
        raise _err(name, "expected", "every entry must record 'qldim'")
    out: dict[str, object] = {}
    out["qldim"] = _check_interval(name, "expected.qldim", raw["qldim"], dim)
    if "ktau" in raw:
        out["ktau"] = _check_interval(name, "expected.ktau", raw["ktau"], dim)
    for key in ("ku",):
        if key in raw:
            pair = raw[key]
            if not isinstance(pair, Sequence) or len(pair) != 2:
                raise _err(name, f"expected.{key}", "need [even, odd]")
            out[key] = (_parse_group(name, f"expected.{key}", pair[0]),
                        _parse_group(name, f"expected.{key}", pair[1]))
    if "ku_mod" in raw:
        body = raw["ku_mod"]
        if not isinstance(body, Mapping) or \
                set(body) != {"m", "even", "odd"}:
            raise _err(name, "expected.ku_mod", "need keys m, even, odd")
        if not isinstance(body["m"], int) or body["m"] < 2:
            raise _err(name, "expected.ku_mod", "modulus must be >= 2")
        out["ku_mod"] = (body["m"],
                         _parse_group(name, "expected.ku_mod", body["even"]),
                         _parse_group(name, "expected.ku_mod", body["odd"]))
    if "e2" in raw:
        body = raw["e2"]
        if not isinstance(body, Mapping) or \
                set(body) - {"exact", "entries"}:
            raise _err(name, "expected.e2", "need keys 'entries' and "
                                            "optionally 'exact'")
        grid = {}
        for key, text in body.get("entries", {}).items():
            p, q = _parse_pq_key(name, "expected.e2", key)
            grid[(p, q)] = _parse_group(name, "expected.e2", text)
        out["e2"] = {"exact": bool(body.get("exact", False)),
                     "entries": grid}
    if "k_table" in raw:
        body = raw["k_table"]
        if not isinstance(body, Mapping) or set(body) - set(_K_TABLE_ROWS):
            raise _err(name, "expected.k_table",
                       f"rows must be among {_K_TABLE_ROWS}")
        out["k_table"] = {row: str(text) for row, text in body.items()}
    if "twisted" in raw:
        body = raw["twisted"]
        if not isinstance(body, Mapping):
            raise _err(name, "expected.twisted", "need one table per twist")
        twisted: dict[str, dict[str, object]] = {}
        for tid, sub in body.items():
            if tid not in twist_ids:
                raise _err(name, "expected.twisted",
                           f"twist {tid!r} is not declared")
            if not isinstance(sub, Mapping) or \
                    set(sub) - {"qldim", "ku", "gysin"}:
                raise _err(name, "expected.twisted",
                           f"{tid}: keys must be qldim/ku/gysin")
            t: dict[str, object] = {}
            if "qldim" in sub:
                t["qldim"] = _check_interval(
                    name, f"expected.twisted.{tid}.qldim", sub["qldim"], dim)
            if "ku" in sub:
                pair = sub["ku"]
                if not isinstance(pair, Sequence) or len(pair) != 2:
                    raise _err(name, f"expected.twisted.{tid}.ku",
                               "need [even, odd]")
                t["ku"] = (
                    _parse_group(name, f"expected.twisted.{tid}.ku", pair[0]),
                    _parse_group(name, f"expected.twisted.{tid}.ku", pair[1]))
            if "gysin" in sub:
                rows = sub["gysin"]
                want = 2 * (dim + 1) + 1
                if not isinstance(rows, Sequence) or len(rows) != want:
                    raise _err(name, f"expected.twisted.{tid}.gysin",
                               f"need {want} degrees for the bundle")
                t["gysin"] = tuple(
                    _parse_group(name, f"expected.twisted.{tid}.gysin", s)
                    for s in rows)
            twisted[tid] = t
        out["twisted"] = twisted
    if "gysin" in raw:
        raise _err(name, "expected",
                   "record gysin under expected.twisted.<class>")
    return out


def _check_citations(name: str, raw: Mapping[str, object],
                     expected: Mapping[str, object]
                     ) -> dict[str, tuple[str, ...]]:
    cites: dict[str, tuple[str, ...]] = {}
    for key, value in raw.items():
        if (not isinstance(value, Sequence) or isinstance(value, str) or
                not all(isinstance(s, str) and s.strip() for s in value)):
            raise _err(name, "citations",
                       f"{key}: need a list of nonempty strings")
        cites[key] = tuple(value)
    if not cites.get("data"):
        raise _err(name, "citations", "need a nonempty 'data' list")
    for key in expected:
        if not cites.get(key):
            raise _err(name, "citations",
                       f"expected value {key!r} has no citation")
    return cites


def _load_file(path: Path) -> CatalogEntry:
    with open(path, "rb") as fh:
        try:
            raw = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise CatalogError(f"{path.name}: {exc}") from None
    name = raw.get("name")
    if not isinstance(name, str) or not name:
        raise CatalogError(f"{path.name}: missing entry name")
    if name != path.stem:
        raise _err(name, "name", f"does not match file name {path.name!r}")
    known = {"name", "title", "dim", "h_int", "ns_rank", "hdg4_rank",
             "k_rational_symbol", "gr_section", "sod", "notes", "hodge",
             "flags", "chow", "twists", "expected", "citations"}
    unknown = set(raw) - known
    if unknown:
        raise _err(name, "file", f"unknown top-level key(s) {sorted(unknown)}")
    dim = raw.get("dim")
    if not isinstance(dim, int) or dim < 1:
        raise _err(name, "dim", f"{dim!r} is not a positive integer")
    h_list = raw.get("h_int")
    if not isinstance(h_list, Sequence) or len(h_list) != 2 * dim + 1:
        raise _err(name, "h_int",
                   f"need {2 * dim + 1} degrees for a {dim}-fold")
    try:
        h_int = GradedAb.from_strings(list(h_list))
    except ValueError as exc:
        raise _err(name, "h_int", str(exc)) from None

    hodge = _parse_hodge(name, raw.get("hodge", {}), dim)
    flags = _parse_flags(name, raw.get("flags", {}))
    sod = _parse_sod(name, raw["sod"]) if "sod" in raw else None
    chow = _parse_chow(name, raw["chow"], dim) if "chow" in raw else None
    twists = _parse_twists(name, raw.get("twists", {}))

    variety = VarietyData(
        name=name, dim=dim, h_int=h_int, hodge=hodge,
        ns_rank=raw.get("ns_rank"), hdg4_rank=raw.get("hdg4_rank"),
        flags=flags, sod=sod, chow=chow, twists=twists)
    problems = variety.violations()
    if problems:
        raise _err(name, "data", "; ".join(problems))

    gr_section = None
    if "gr_section" in raw:
        marker = raw["gr_section"]
        if (not isinstance(marker, Sequence) or len(marker) != 3 or
                not all(isinstance(x, int) for x in marker)):
            raise _err(name, "gr_section", "need [k, n, codim]")
        gr_section = (marker[0], marker[1], marker[2])

    expected = _check_expected(name, raw.get("expected", {}), dim,
                               {t.brauer_class_id for t in twists})
    citations = _check_citations(name, raw.get("citations", {}), expected)
    notes = tuple(raw.get("notes", ()))
    return CatalogEntry(
        name=name, title=raw.get("title", name), variety=variety,
        expected=expected, citations=citations, notes=notes,
        k_rational_symbol=raw.get("k_rational_symbol", "K_n(X,Q)"),
        gr_section=gr_section, path=str(path))


def load_catalog(path: Optional[Union[str, Path]] = None
                 ) -> dict[str, CatalogEntry]:
    """Load every ``*.toml`` under the catalog directory, keyed by name.

    >>> "cubic-5fold" in load_catalog()
    True
    """
    base = Path(path) if path is not None else CATALOG_DIR
    files = sorted(base.glob("*.toml"))
    if not files:
        raise CatalogError(f"no catalog files under {base}")
    catalog: dict[str, CatalogEntry] = {}
    for file in files:
        entry = _load_file(file)
        if entry.name in catalog:
            raise _err(entry.name, "name", "duplicate entry name")
        catalog[entry.name] = entry
    for entry in catalog.values():
        for comp in entry.variety.sod or ():
            if comp.kind in ("variety", "twisted_variety"):
                if comp.name not in catalog:
                    raise _err(entry.name, "sod",
                               f"component {comp.name!r} is not in the "
                               "catalog")
                if comp.kind == "twisted_variety":
                    sub = catalog[comp.name].variety
                    if all(t.brauer_class_id != comp.brauer_class_id
                           for t in sub.twists):
                        raise _err(entry.name, "sod",
                                   f"{comp.name!r} has no twist "
                                   f"{comp.brauer_class_id!r}")
    return catalog


# ---------------------------------------------------------------------------
# resolving semiorthogonal components across the catalog


def make_resolver(catalog: Mapping[str, CatalogEntry]
                  ) -> Callable[[ComponentRef], QLResult]:
    """Closure resolving variety components to weight intervals by running
    the decision pipeline on the referenced entries; memoized, with cycle
    detection.  The recursion chain is per-thread, so the closure can be
    shared by a parallel catalog run."""
    import threading

    memo: dict[tuple, QLResult] = {}
    local = threading.local()

    def resolve(ref: ComponentRef) -> QLResult:
        if ref.kind == "variety":
            key = ("plain", ref.name)
        elif ref.kind == "twisted_variety":
            key = ("twisted", ref.name, ref.brauer_class_id)
        else:
            raise CatalogError(f"resolver got a {ref.kind} component")
        if key in memo:
            return memo[key]
        active = getattr(local, "chain", None)
        if active is None:
            active = local.chain = []
        if key in active:
            chain = " -> ".join(str(k[1]) for k in active + [key])
            raise CatalogError(f"cyclic component reference: {chain}")
        entry = catalog.get(ref.name)
        if entry is None:
            raise CatalogError(f"component {ref.name!r} is not in the catalog")
        active.append(key)
        try:
            if ref.kind == "variety":
                result = combine(entry.variety, resolve=resolve)
            else:
                base = resolve(ComponentRef.variety(ref.name))
                result = rule_twisted_enriques_chain(
                    entry.variety, entry.variety.twist(ref.brauer_class_id),
                    base=base)
        finally:
            active.pop()
        memo[key] = result
        return result

    return resolve


# ---------------------------------------------------------------------------
# running one entry


@dataclass(frozen=True)
class Check:
    """Outcome of one comparison: ok / fail / error / skip."""
    __slots__ = ("name", "status", "detail")
    name: str
    status: str
    detail: str

    @property
    def passed(self) -> bool:
        return self.status in ("ok", "skip")


@dataclass
class EntryRun:
    """Everything computed for one entry, plus its check outcomes."""
    entry: CatalogEntry
    qldim: Optional[QLResult] = None
    page: Optional[BigradedPage] = None
    profile: Optional[KtauProfile] = None
    ku: Optional[tuple[FgAbGroup, FgAbGroup]] = None
    gysin: dict[str, GradedAb] = field(default_factory=dict)
    twisted_qldim: dict[str, QLResult] = field(default_factory=dict)
    twisted_ku: dict[str, tuple[FgAbGroup, FgAbGroup]] = \
        field(default_factory=dict)
    k_table: Optional[dict[int, str]] = None
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]


def _split_certificates(v: VarietyData) -> tuple[str, ...]:
    if v.chow is None:
        return ()
    certs = {e.certificate for e in v.chow.entries.values() if e.certificate}
    return tuple(sorted(certs))


def _resolved_ku(v: VarietyData) -> tuple[FgAbGroup, FgAbGroup]:
    even, odd = ahss_ku(v.h_int, SplitPolicy.assume_split())
    if even.resolved is None or odd.resolved is None:
        raise ValueError(f"{v.name}: KU extension not resolved")
    return even.resolved, odd.resolved


def _twisted_ku(v: VarietyData, twist: Twist
                ) -> tuple[FgAbGroup, FgAbGroup]:
    """KU of the index-2 twisted form: the etale P^1-bundle carries
    KU(X) + KU(X, alpha), so subtract the untwisted summand."""
    hp = gysin_p1(v.h_int, dict(twist.cup))
    p_even, p_odd = _resolved_ku_graded(hp)
    x_even, x_odd = _resolved_ku(v)
    return (subtract_summand(p_even, x_even), subtract_summand(p_odd, x_odd))


def _resolved_ku_graded(h: GradedAb) -> tuple[FgAbGroup, FgAbGroup]:
    even, odd = ahss_ku(h, SplitPolicy.assume_split())
    if even.resolved is None or odd.resolved is None:
        raise ValueError("KU extension not resolved")
    return even.resolved, odd.resolved


def k_rows(entry: CatalogEntry, qldim_hi: int,
           degrees: Iterable[int]) -> dict[int, str]:
    """K-groups by degree, as strings, in whichever mode fits the entry.

    With a decomposition whose distinguished component is a phantom the
    rows collapse to "0" once the vanishing criterion fires; a
    decomposition with one interesting component delegates to the
    component table; an entry with Chow data but no decomposition gets its
    own filtration and high-degree assembly.
    """
    v = entry.variety
    degrees = sorted(set(degrees))
    certs = _split_certificates(v)
    symbol = entry.k_rational_symbol
    rest = [c for c in v.sod or ()
            if c.kind not in ("exceptional", "curve")]
    if len(rest) == 1:
        if rest[0].kind == "phantom":
            table0 = component_k_table(v, qldim_hi, [0],
                                       split_certificates=certs,
                                       rational_symbol=symbol)
            verdict = phantom_vanishing(table0[0], qldim_hi)
            if verdict.is_zero:
                return {n: "0" for n in degrees}
            raise ValueError(f"{v.name}: phantom vanishing undecided: "
                             f"{verdict.reason}")
        curves = any(c.kind == "curve" for c in v.sod)
        if curves and 0 in degrees:
            raise ValueError(f"{v.name}: K_0 is not computed over curve "
                             "factors")
        table = component_k_table(v, qldim_hi, degrees,
                                  split_certificates=certs,
                                  rational_symbol=symbol)
        return {n: str(expr) for n, expr in table.items()}
    if len(rest) > 1:
        raise ValueError(f"{v.name}: more than one distinguished component")
    # whole-variety mode: no decomposition, or only point/curve factors
    rows: dict[int, str] = {}
    if 0 in degrees:
        if v.chow is None:
            raise ValueError(f"{v.name}: K_0 needs Chow data")
        res = k0_filtration(v.chow, certs, dim=v.dim)
        if not res.exact:
            raise ValueError(f"{v.name}: K_0 filtration not certified in "
                             f"codimension(s) {list(res.uncertified)}")
        rows[0] = str(res.expr)
    even, odd = _resolved_ku(v)
    for n in degrees:
        if n > 0:
            rows[n] = str(assemble_high_kn(even, odd, qldim_hi, n,
                                           rational_symbol=symbol))
    return rows


def _interval(result: QLResult) -> tuple[int, int]:
    lo, hi = result.interval
    return (lo, hi)


def run_entry(entry: CatalogEntry,
              resolve: Optional[Callable[[ComponentRef], QLResult]] = None
              ) -> EntryRun:
    """Compute everything for one entry and check its expectations."""
    v = entry.variety
    expected = entry.expected
    run = EntryRun(entry=entry)
    checks = run.checks

    def record(name: str, fn: Callable[[], Optional[Check]]) -> None:
        try:
            result = fn()
        except Exception as exc:  # noqa: BLE001 - recorded, not swallowed
            checks.append(Check(name, "error", f"{type(exc).__name__}: {exc}"))
        else:
            if result is not None:
                checks.append(result)

    # weight interval ------------------------------------------------------
    def do_qldim() -> Check:
        run.qldim = combine(v, resolve=resolve)
        want = expected["qldim"]
        got = _interval(run.qldim)
        if got == tuple(want):
            return Check("qldim", "ok", f"[{got[0]},{got[1]}]")
        return Check("qldim", "fail", f"expected {list(want)}, got "
                                      f"{list(got)}")
    record("qldim", do_qldim)

    # integral page and mod-m profile -------------------------------------
    if 2 <= v.dim <= 5:
        def do_page() -> Optional[Check]:
            run.page = build_bloch_ogus_page(v)
            if "e2" not in expected:
                return None
            spec = expected["e2"]
            problems = []
            for (p, q), group in sorted(spec["entries"].items()):
                got = run.page.entry(p, q)
                if not isinstance(got, FgAbGroup):
                    problems.append(f"({p},{q}) is not pinned down: {got}")
                elif got != group:
                    problems.append(f"({p},{q}) expected {group}, got {got}")
            if spec["exact"]:
                allowed = set(spec["entries"])
                for (p, q), got in run.page.nonzero_entries():
                    if (p, q) not in allowed:
                        problems.append(f"unexpected nonzero entry at "
                                        f"({p},{q}): {got}")
            if problems:
                return Check("e2", "fail", "; ".join(problems))
            return Check("e2", "ok", f"{len(spec['entries'])} entries")
        record("e2", do_page)

        def do_profile() -> Optional[Check]:
            if run.page is None:
                return None
            run.profile = ktau_profile(ktau_e2(run.page))
            if "ktau" not in expected:
                return None
            want = expected["ktau"]
            got = (run.profile.lower_bound(), run.profile.upper_bound())
            if got == tuple(want):
                return Check("ktau", "ok", f"[{got[0]},{got[1]}]")
            return Check("ktau", "fail",
                         f"expected {list(want)}, got {list(got)}")
        record("ktau", do_profile)

        def do_rule_vs_pipeline() -> Optional[Check]:
            if run.profile is None or v.dim > 4:
                return None
            rule = {2: qldim_surface, 3: qldim_3fold_rc,
                    4: qldim_4fold_rc}[v.dim](v)
            r_lo, r_hi = rule.interval
            lo = run.profile.lower_bound()
            hi = run.profile.upper_bound()
            if r_lo > hi or lo > r_hi:
                return Check("criterion-vs-pipeline", "fail",
                             f"criterion [{r_lo},{r_hi}] does not "
                             f"meet pipeline [{lo},{hi}]")
            if rule.is_exact and lo == hi and (r_lo, r_hi) != (lo, hi):
                return Check("criterion-vs-pipeline", "fail",
                             f"criterion [{r_lo},{r_hi}] and pipeline "
                             f"[{lo},{hi}] are both exact but differ")
            return Check("criterion-vs-pipeline", "ok",
                         f"criterion [{r_lo},{r_hi}], pipeline "
                         f"[{lo},{hi}]")
        record("criterion-vs-pipeline", do_rule_vs_pipeline)

    # KU -------------------------------------------------------------------
    def do_ku() -> Optional[Check]:
        run.ku = _resolved_ku(v)
        if "ku" not in expected:
            return None
        want = expected["ku"]
        if run.ku == tuple(want):
            return Check("ku", "ok", f"{run.ku[0]} | {run.ku[1]}")
        return Check("ku", "fail",
                     f"expected {want[0]} | {want[1]}, got "
                     f"{run.ku[0]} | {run.ku[1]}")
    record("ku", do_ku)

    if "ku_mod" in expected:
        def do_ku_mod() -> Check:
            m, want_even, want_odd = expected["ku_mod"]
            even, odd = run.ku if run.ku else _resolved_ku(v)
            got = ku_mod_m(even, odd, m)
            if got == (want_even, want_odd):
                return Check("ku_mod", "ok", f"mod {m}: {got[0]} | {got[1]}")
            return Check("ku_mod", "fail",
                         f"mod {m}: expected {want_even} | {want_odd}, got "
                         f"{got[0]} | {got[1]}")
        record("ku_mod", do_ku_mod)

    # twists ---------------------------------------------------------------
    for twist in v.twists:
        tid = twist.brauer_class_id
        spec = (expected.get("twisted") or {}).get(tid, {})

        def do_gysin(twist=twist, tid=tid, spec=spec) -> Optional[Check]:
            run.gysin[tid] = gysin_p1(v.h_int, dict(twist.cup))
            if "gysin" not in spec:
                return None
            want = spec["gysin"]
            got = run.gysin[tid]
            top = 2 * (v.dim + 1)
            diffs = [f"degree {i}: expected {want[i]}, got {got.group(i)}"
                     for i in range(top + 1) if got.group(i) != want[i]]
            if diffs:
                return Check(f"gysin[{tid}]", "fail", "; ".join(diffs))
            return Check(f"gysin[{tid}]", "ok", f"{top + 1} degrees")
        record(f"gysin[{tid}]", do_gysin)

        def do_twisted(twist=twist, tid=tid, spec=spec) -> Optional[Check]:
            base = run.qldim
            chain = rule_twisted_enriques_chain(v, twist, base=base)
            run.twisted_qldim[tid] = chain
            if "qldim" not in spec:
                return None
            want = spec["qldim"]
            got = _interval(chain)
            if got == tuple(want):
                return Check(f"twisted-qldim[{tid}]", "ok",
                             f"[{got[0]},{got[1]}]")
            return Check(f"twisted-qldim[{tid}]", "fail",
                         f"expected {list(want)}, got {list(got)}")
        record(f"twisted-qldim[{tid}]", do_twisted)

        def do_twisted_ku(twist=twist, tid=tid, spec=spec) -> Optional[Check]:
            run.twisted_ku[tid] = _twisted_ku(v, twist)
            if "ku" not in spec:
                return None
            want = spec["ku"]
            got = run.twisted_ku[tid]
            if got == tuple(want):
                return Check(f"twisted-ku[{tid}]", "ok",
                             f"{got[0]} | {got[1]}")
            return Check(f"twisted-ku[{tid}]", "fail",
                         f"expected {want[0]} | {want[1]}, got "
                         f"{got[0]} | {got[1]}")
        record(f"twisted-ku[{tid}]", do_twisted_ku)

    # K-groups -------------------------------------------------------------
    if "k_table" in expected:
        def do_k_table() -> Check:
            hi = run.qldim.interval[1] if run.qldim is not None else v.dim
            rows = k_rows(entry, hi, range(0, 5))
            run.k_table = rows
            spec = expected["k_table"]
            problems = []
            if "0" in spec:
                if 0 not in rows:
                    problems.append("no K_0 row computed")
                elif rows[0] != spec["0"]:
                    problems.append(f"K_0 expected {spec['0']!r}, got "
                                    f"{rows[0]!r}")
            for label, degrees in (("odd", (1, 3)), ("even", (2, 4))):
                if label not in spec:
                    continue
                for n in degrees:
                    if rows.get(n) != spec[label]:
                        problems.append(f"K_{n} expected {spec[label]!r}, "
                                        f"got {rows.get(n)!r}")
            if problems:
                return Check("k-table", "fail", "; ".join(problems))
            return Check("k-table", "ok", f"{len(rows)} degrees")
        record("k-table", do_k_table)

    # Schubert marker ------------------------------------------------------
    if entry.gr_section is not None:
        def do_gr() -> Check:
            k, n, c = entry.gr_section
            want = hodge_middle(k, n, c)
            d = v.dim
            if len(want) != d + 1:
                return Check("gr-section", "fail",
                             f"marker gives a {len(want) - 1}-fold, entry "
                             f"has dimension {d}")
            got = [v.h(p, d - p) for p in range(d + 1)]
            if None in got:
                return Check("gr-section", "fail",
                             "middle Hodge row not fully recorded")
            if got != want:
                return Check("gr-section", "fail",
                             f"expected {want}, recorded {got}")
            return Check("gr-section", "ok", str(want))
        record("gr-section", do_gr)

    return run


# ---------------------------------------------------------------------------
# whole-catalog run with cross-entry checks


@dataclass
class CatalogRun:
    """All entry runs plus the cross-entry consistency checks."""
    runs: dict[str, EntryRun]
    cross: list[Check]

    @property
    def ok(self) -> bool:
        return (all(r.ok for r in self.runs.values()) and
                all(c.passed for c in self.cross))

    def failures(self) -> list[tuple[str, Check]]:
        out = []
        for name in sorted(self.runs):
            out.extend((name, c) for c in self.runs[name].failures())
        out.extend(("cross", c) for c in self.cross if not c.passed)
        return out

    def render(self) -> str:
        lines = []
        for name in sorted(self.runs):
            run = self.runs[name]
            bad = run.failures()
            status = "ok" if not bad else "FAIL"
            lines.append(f"{name:32s} {status}  "
                         f"({len(run.checks)} checks)")
            for check in bad:
                lines.append(f"    {check.name}: {check.status} "
                             f"- {check.detail}")
        lines.append("")
        for check in self.cross:
            mark = "ok" if check.passed else "FAIL"
            lines.append(f"cross {check.name:40s} {mark}")
            if not check.passed:
                lines.append(f"    {check.detail}")
        total = sum(len(r.checks) for r in self.runs.values()) + \
            len(self.cross)
        bad = len(self.failures())
        lines.append("")
        lines.append(f"{len(self.runs)} entries, {total} checks, "
                     f"{bad} failure(s)")
        return "\n".join(lines)


def _component_ku(catalog: Mapping[str, CatalogEntry], comp: ComponentRef
                  ) -> Optional[tuple[FgAbGroup, FgAbGroup]]:
    if comp.kind == "exceptional":
        return (FgAbGroup.free(1), FgAbGroup())
    if comp.kind == "curve":
        return (FgAbGroup.free(2), FgAbGroup.free(2 * comp.genus))
    if comp.kind == "phantom":
        return (FgAbGroup(), FgAbGroup())
    if comp.kind == "variety":
        return _resolved_ku(catalog[comp.name].variety)
    if comp.kind == "twisted_variety":
        sub = catalog[comp.name].variety
        return _twisted_ku(sub, sub.twist(comp.brauer_class_id))
    return None  # opaque: no KU model


def _cross_checks(catalog: Mapping[str, CatalogEntry],
                  runs: Mapping[str, EntryRun]) -> list[Check]:
    checks: list[Check] = []
    resolve = make_resolver(catalog)
    for name in sorted(catalog):
        entry = catalog[name]
        sod = entry.variety.sod
        if not sod:
            continue

        # weight equality across the decomposition
        main = [c for c in sod if c.kind in ("variety", "twisted_variety")]
        rest = [c for c in sod
                if c.kind not in ("variety", "twisted_variety")]
        own = runs[name].qldim
        if own is not None and len(main) == 1 and all(
                c.kind in ("exceptional", "phantom") or
                (c.kind == "curve" and c.genus == 0) for c in rest):
            comp = main[0]
            label = (comp.name if comp.kind == "variety"
                     else f"{comp.name}[{comp.brauer_class_id}]")
            try:
                other = resolve(comp)
            except Exception as exc:  # noqa: BLE001
                checks.append(Check(f"derived-weight {name} ~ {label}",
                                    "error", str(exc)))
            else:
                (a_lo, a_hi), (b_lo, b_hi) = own.interval, other.interval
                if own.is_exact and other.is_exact:
                    good = (a_lo, a_hi) == (b_lo, b_hi)
                    detail = (f"{name} [{a_lo},{a_hi}] vs {label} "
                              f"[{b_lo},{b_hi}]")
                else:
                    good = a_lo <= b_hi and b_lo <= a_hi
                    detail = (f"{name} [{a_lo},{a_hi}] meets {label} "
                              f"[{b_lo},{b_hi}]")
                checks.append(Check(f"derived-weight {name} ~ {label}",
                                    "ok" if good else "fail", detail))

        # KU additivity over the decomposition
        if any(c.kind == "opaque" for c in sod):
            checks.append(Check(f"ku-additivity {name}", "skip",
                                "opaque component has no KU model"))
            continue
        try:
            total_even, total_odd = FgAbGroup(), FgAbGroup()
            for comp in sod:
                pair = _component_ku(catalog, comp)
                if pair is None:
                    raise ValueError(f"no KU model for {comp}")
                total_even = total_even + pair[0]
                total_odd = total_odd + pair[1]
            own_even, own_odd = _resolved_ku(entry.variety)
        except Exception as exc:  # noqa: BLE001
            checks.append(Check(f"ku-additivity {name}", "error", str(exc)))
            continue
        if (total_even, total_odd) == (own_even, own_odd):
            checks.append(Check(f"ku-additivity {name}", "ok",
                                f"{own_even} | {own_odd}"))
        else:
            checks.append(Check(
                f"ku-additivity {name}", "fail",
                f"components sum to {total_even} | {total_odd}, variety has "
                f"{own_even} | {own_odd}"))
    return checks


def check_all(catalog: Optional[Mapping[str, CatalogEntry]] = None,
              parallel: bool = False) -> CatalogRun:
    """Run every entry and the cross-entry checks.

    The result is identical with ``parallel=True`` and ``False``: entries
    are pure computations and the output is assembled in name order.
    """
    if catalog is None:
        catalog = load_catalog()
    names = sorted(catalog)
    resolve = make_resolver(catalog)
    if parallel:
        with concurrent.futures.ThreadPoolExecutor() as pool:
            futures = {name: pool.submit(run_entry, catalog[name], resolve)
                       for name in names}
            runs = {name: futures[name].result() for name in names}
    else:
        runs = {name: run_entry(catalog[name], resolve) for name in names}
    cross = _cross_checks(catalog, runs)
    return CatalogRun(runs=runs, cross=cross)


# ---------------------------------------------------------------------------
# reports


def _hodge_diamond(v: VarietyData) -> str:
    """Triangular Hodge diamond; the upper half is recorded data and the
    lower half is filled in by Serre duality.  Unrecorded spots print '.'"""
    d = v.dim

    def cell(p: int, q: int) -> str:
        value = v.h(p, q)
        if value is None and p + q > d:
            value = v.h(d - p, d - q)
        return "." if value is None else str(value)

    rows = []
    for n in range(0, 2 * d + 1):
        cells = [cell(p, n - p) for p in range(min(n, d), max(0, n - d) - 1,
                                               -1)]
        rows.append(cells)
    width = max(len(c) for row in rows for c in row)
    lines = []
    total = (d + 1) * (width + 2)
    for row in rows:
        text = ("  ".join(c.rjust(width) for c in row))
        lines.append(text.center(total).rstrip())
    return "\n".join(lines)


def _cohomology_lines(v: VarietyData) -> list[str]:
    return [f"H^{i:<2d} = {v.h_int.group(i)}"
            for i in range(0, 2 * v.dim + 1)]


def _flag_lines(v: VarietyData) -> list[str]:
    from dataclasses import fields as dc_fields
    out = []
    for f in dc_fields(v.flags):
        value = getattr(v.flags, f.name)
        if value is not None:
            out.append(f"{f.name} = {value}")
    return out


def _sod_line(v: VarietyData) -> str:
    if v.sod is None:
        return "(none recorded)"
    return " + ".join(str(c) for c in v.sod)


def _sections(entry: CatalogEntry, run: EntryRun
              ) -> list[tuple[str, str]]:
    v = entry.variety
    out: list[tuple[str, str]] = []
    head = [f"{entry.title} (dim {v.dim})"]
    head.extend(entry.notes)
    out.append(("entry", "\n".join(head)))
    out.append(("cohomology", "\n".join(_cohomology_lines(v))))
    if v.hodge:
        out.append(("hodge", _hodge_diamond(v)))
    flags = _flag_lines(v)
    if flags:
        out.append(("flags", "\n".join(flags)))
    if v.sod is not None:
        out.append(("decomposition", _sod_line(v)))
    if run.page is not None:
        out.append(("e2-grid", run.page.render()))
    if run.profile is not None:
        out.append(("profile", run.profile.render()))
    if run.qldim is not None:
        out.append(("qldim", run.qldim.render()))
    if run.ku is not None:
        out.append(("ku", f"KU^even = {run.ku[0]}\nKU^odd  = {run.ku[1]}"))
    for tid in sorted(run.gysin):
        h = run.gysin[tid]
        lines = [f"H^{i}(P) = {h.group(i)}"
                 for i in range(0, 2 * (v.dim + 1) + 1)]
        out.append((f"gysin[{tid}]", "\n".join(lines)))
    for tid in sorted(run.twisted_qldim):
        body = [run.twisted_qldim[tid].render()]
        if tid in run.twisted_ku:
            even, odd = run.twisted_ku[tid]
            body.append(f"KU^even = {even}")
            body.append(f"KU^odd  = {odd}")
        out.append((f"twisted[{tid}]", "\n".join(body)))
    if run.k_table is not None:
        lines = [f"K_{n} = {text}" for n, text in sorted(run.k_table.items())]
        out.append(("k-table", "\n".join(lines)))
    checks = [f"{c.name}: {c.status}" +
              (f" - {c.detail}" if not c.passed else "")
              for c in run.checks]
    if checks:
        out.append(("checks", "\n".join(checks)))
    return out


def report(entry: CatalogEntry,
           run: Optional[EntryRun] = None,
           fmt: str = "text",
           resolve: Optional[Callable[[ComponentRef], QLResult]] = None
           ) -> str:
    """Full report for one entry, as plain text or markdown."""
    if fmt not in ("text", "markdown"):
        raise ValueError(f"unknown format {fmt!r}")
    if run is None:
        run = run_entry(entry, resolve)
    parts = []
    if fmt == "markdown":
        parts.append(f"# {entry.name}")
        for title, body in _sections(entry, run):
            parts.append(f"\n## {title}\n")
            if title == "entry":
                parts.append(body)
            else:
                parts.append(f"```\n{body}\n```")
    else:
        parts.append(f"=== {entry.name} ===")
        for title, body in _sections(entry, run):
            parts.append(f"\n-- {title} --")
            parts.append(body)
    return "\n".join(parts) + "\n"


def report_section(entry: CatalogEntry, section: str,
                   run: Optional[EntryRun] = None,
                   resolve: Optional[Callable[[ComponentRef], QLResult]] = None
                   ) -> str:
    """One named block of the report ('hodge', 'e2-grid', 'k-table', ...)."""
    if run is None:
        run = run_entry(entry, resolve)
    for title, body in _sections(entry, run):
        if title == section:
            return body
    known = ", ".join(t for t, _ in _sections(entry, run))
    raise ValueError(f"{entry.name} has no section {section!r}; "
                     f"available: {known}")
