"""The decision engine for Quillen-Lichtenbaum dimension.

Each rule in this module is an independent certified bound-producer: it
inspects a `VarietyData` record (or a semiorthogonal decomposition, or a
Brauer twist) and either stands down or returns an interval together with a
`Certificate` naming the argument.  `combine` intersects everything that
applies.  The same value is routinely bounded by several unrelated rules;
the intersection is the cross-check, and an empty intersection is a hard
error pointing at the two offending certificates, never a silent clamp.

Unknown flags never produce a bound.  They produce explicitly undetermined
certificates so the reader can see what data would sharpen the interval.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from .extensions import SplitPolicy
from .groups import subtract_summand
from .pages import GysinError, ahss_ku, build_bloch_ogus_page, gysin_p1, \
    ktau_e2, ktau_profile
from .variety import ComponentRef, Twist, VarietyData

__all__ = [
    "Certificate",
    "QLResult",
    "TorsionStatement",
    "combine",
    "qldim_3fold_rc",
    "qldim_4fold_rc",
    "qldim_surface",
    "rule_conic_upper",
    "rule_hodge_lower",
    "rule_rational_upper",
    "rule_sod",
    "rule_torsion_order",
    "rule_twisted_enriques_chain",
    "rule_twisted_upper",
]

# citation strings name the classical inputs behind each rule
_CITE_SURFACE = "Lefschetz (1,1) + Brauer torsion"
_CITE_3FOLD = "Colliot-Thelene--Voisin"
_CITE_4FOLD = "coniveau + integral Hodge conditions (after Voisin)"
_CITE_FKW = "Farb--Kisin--Wolfson"
_CITE_RATIONAL = "weak factorization + blow-up formula"
_CITE_CONIC = "Kahn--Rost--Sujatha"
_CITE_SOD = "additivity of K-theory over semiorthogonal components"
_CITE_TWISTED = "index-2 etale P^1-bundle comparison"
_CITE_DIAG = "decomposition of the diagonal (Bloch--Srinivas)"
_CITE_CHAIN = "Gysin + Atiyah--Hirzebruch for the etale P^1-bundle"
_CITE_PROFILE = "motivic K/tau spectral sequence"
_CITE_RANGE = "Quillen--Lichtenbaum (Voevodsky--Rost)"


@dataclass(frozen=True)
class Certificate:
    """One line of justification: which rule, resting on what, giving what."""

    rule: str
    citation: str
    bound: str

    def __str__(self) -> str:
        return f"{self.rule} — {self.citation} — {self.bound}"


@dataclass(frozen=True)
class QLResult:
    lo: int
    hi: int
    certificates: tuple[Certificate, ...] = ()

    def __post_init__(self):
        if not 0 <= self.lo <= self.hi:
            raise ValueError(f"bad interval [{self.lo},{self.hi}]")

    @property
    def interval(self) -> tuple[int, int]:
        return (self.lo, self.hi)

    @property
    def is_exact(self) -> bool:
        return self.lo == self.hi

    def render(self) -> str:
        lines = [f"dimQL ∈ [{self.lo},{self.hi}]"]
        lines.extend(f"  {c}" for c in self.certificates)
        return "\n".join(lines)


@dataclass(frozen=True)
class TorsionStatement:
    """Torsion-order consequences of a rational decomposition of the
    diagonal: bounds on the exponent of the top two finite-coefficient
    K-groups, plus an outright upper bound when the order is 1."""

    order: int
    lines: tuple[str, ...]
    upper: Optional[int]
    certificate: Certificate


def _hodge(v: VarietyData, p: int, q: int) -> Optional[int]:
    value = v.h(p, q)
    if value is None:
        value = v.h(q, p)
    return value


# ---------------------------------------------------------------------------
# dimension criteria


def qldim_surface(v: VarietyData) -> QLResult:
    """Exact value for a surface: 2 unless the geometric genus vanishes and
    H^3 is torsion-free, in which case the irregularity decides 0 vs 1."""
    if v.dim != 2:
        raise ValueError(f"surface criterion needs dim 2, got {v.dim}")
    rule = "surface-criterion"
    if not v.torsion(3).is_zero:
        return QLResult(2, 2, (
            Certificate(rule, _CITE_SURFACE, "= 2 (torsion in H^3)"),))
    pg = _hodge(v, 0, 2)
    if pg is None:
        return QLResult(0, 2, (
            Certificate(rule, _CITE_SURFACE,
                        "undetermined (geometric genus unrecorded)"),))
    if pg != 0:
        return QLResult(2, 2, (
            Certificate(rule, _CITE_SURFACE, "= 2 (p_g != 0)"),))
    q = _hodge(v, 0, 1)
    if q is None:
        return QLResult(0, 1, (
            Certificate(rule, _CITE_SURFACE, "<= 1 (p_g = 0, H^3 torsion-free)"),
            Certificate(rule, _CITE_SURFACE,
                        "undetermined (irregularity unrecorded)")))
    if q != 0:
        return QLResult(1, 1, (
            Certificate(rule, _CITE_SURFACE, "= 1 (p_g = 0, q != 0)"),))
    return QLResult(0, 0, (
        Certificate(rule, _CITE_SURFACE, "= 0 (p_g = q = 0, H^3 torsion-free)"),))


def qldim_3fold_rc(v: VarietyData) -> QLResult:
    """Exact value for a rationally connected 3-fold, read off H^3."""
    if v.dim != 3:
        raise ValueError(f"3-fold criterion needs dim 3, got {v.dim}")
    rule = "threefold-criterion"
    if v.flags.rationally_connected is not True:
        return QLResult(0, 3, (
            Certificate(rule, _CITE_3FOLD,
                        "undetermined (rational connectedness not established)"),))
    h3 = v.h_int.group(3)
    if not h3.torsion_part().is_zero:
        return QLResult(2, 2, (
            Certificate(rule, _CITE_3FOLD, "= 2 (torsion in H^3)"),))
    if h3.is_zero:
        return QLResult(0, 0, (
            Certificate(rule, _CITE_3FOLD, "= 0 (H^3 = 0)"),))
    return QLResult(1, 1, (
        Certificate(rule, _CITE_3FOLD, "= 1 (H^3 torsion-free, nonzero)"),))


def qldim_4fold_rc(v: VarietyData) -> QLResult:
    """Bound rules for a rationally connected 4-fold.

    The two cycle-theoretic flags (1-cycles: algebraic = homological
    equivalence; coniveau 2 fills H^5) characterize <= 3; adding the integral
    Hodge conjecture in degrees 4 and 6 characterizes <= 2.  On top of that,
    h^{1,3} = 0 with torsion-free H^5 and H^3 gives <= 1, while a nonzero
    h^{1,3} or torsion in H^5 forces >= 2.  Unknown flags widen the interval
    and leave an undetermined certificate.
    """
    if v.dim != 4:
        raise ValueError(f"4-fold criterion needs dim 4, got {v.dim}")
    rule = "fourfold-criterion"
    f = v.flags
    if f.rationally_connected is not True:
        return QLResult(0, 4, (
            Certificate(rule, _CITE_4FOLD,
                        "undetermined (rational connectedness not established)"),))

    lo, hi = 0, 4
    certs: list[Certificate] = []
    missing: list[str] = []

    def upper(bound: int, text: str) -> None:
        nonlocal hi
        if bound < hi:
            hi = bound
        certs.append(Certificate(rule, _CITE_4FOLD, text))

    def lower(bound: int, text: str) -> None:
        nonlocal lo
        if bound > lo:
            lo = bound
            certs.append(Certificate(rule, _CITE_4FOLD, text))

    named = (("alg_eq_hom_ch1", f.alg_eq_hom_ch1), ("n2h5_full", f.n2h5_full),
             ("ihc_h4", f.ihc_h4), ("ihc_h6", f.ihc_h6))
    cycle_flags = (f.alg_eq_hom_ch1, f.n2h5_full)
    four = (f.alg_eq_hom_ch1, f.n2h5_full, f.ihc_h4, f.ihc_h6)

    if all(x is True for x in cycle_flags):
        upper(3, "<= 3 (1-cycle and coniveau conditions hold)")
    elif any(x is False for x in cycle_flags):
        lower(4, ">= 4 (a 1-cycle or coniveau condition fails)")
    else:
        missing.extend(n for n, x in named[:2] if x is None)

    if all(x is True for x in four):
        upper(2, "<= 2 (+ integral Hodge in degrees 4 and 6)")
    elif any(x is False for x in four):
        lower(3, ">= 3 (integral Hodge or cycle condition fails)")
    else:
        missing.extend(n for n, x in named[2:] if x is None)

    h13 = _hodge(v, 1, 3)
    tors5 = v.torsion(5)
    if all(x is True for x in four):
        if h13 is None:
            missing.append("h^{1,3}")
        elif h13 == 0 and tors5.is_zero and v.torsion(3).is_zero:
            upper(1, "<= 1 (h^{1,3} = 0, H^5 and H^3 torsion-free)")

    if (h13 is not None and h13 != 0) or not tors5.is_zero:
        lower(2, ">= 2 (h^{1,3} != 0 or torsion in H^5)")

    if missing:
        seen = sorted(set(missing), key=missing.index)
        certs.append(Certificate(
            rule, _CITE_4FOLD, "undetermined (missing: " + ", ".join(seen) + ")"))
    return QLResult(lo, hi, tuple(certs))


# ---------------------------------------------------------------------------
# generic bound rules


def rule_hodge_lower(v: VarietyData) -> Optional[QLResult]:
    """h^{0,d} != 0 pins the dimension exactly (d is always an upper bound)."""
    top = _hodge(v, 0, v.dim)
    if not top:
        return None
    return QLResult(v.dim, v.dim, (
        Certificate("hodge-top-lower", _CITE_FKW,
                    f"= {v.dim} (h^{{0,{v.dim}}} != 0)"),))


def rule_rational_upper(v: VarietyData) -> Optional[QLResult]:
    if v.flags.rational is not True:
        return None
    bound = max(v.dim - 2, 0)
    return QLResult(0, bound, (
        Certificate("rational-upper", _CITE_RATIONAL, f"<= {bound}"),))


def rule_conic_upper(v: VarietyData) -> Optional[QLResult]:
    base = v.flags.conic_bundle_base_dim
    if base is None:
        return None
    return QLResult(0, base, (
        Certificate("conic-upper", _CITE_CONIC,
                    f"<= {base} (conic bundle over a {base}-fold)"),))


_SELF_CONTAINED = {"exceptional": (0, 0), "phantom": (0, 0)}


def _component_interval(ref: ComponentRef,
                        resolve: Optional[Callable[[ComponentRef], QLResult]],
                        ) -> tuple[int, int]:
    if ref.kind in _SELF_CONTAINED:
        return _SELF_CONTAINED[ref.kind]
    if ref.kind == "curve":
        return (0, 0) if ref.genus == 0 else (1, 1)
    if ref.kind == "opaque":
        return ref.interval
    # variety / twisted_variety
    if resolve is None:
        raise ValueError(
            f"component {ref} needs a resolver to produce an interval")
    result = resolve(ref)
    return result.lo, result.hi


def rule_sod(components: Sequence[ComponentRef],
             resolve: Optional[Callable[[ComponentRef], QLResult]] = None,
             ) -> QLResult:
    """Componentwise max over a semiorthogonal decomposition."""
    if not components:
        raise ValueError("a semiorthogonal decomposition needs components")
    intervals = [_component_interval(ref, resolve) for ref in components]
    lo = max(a for a, _ in intervals)
    hi = max(b for _, b in intervals)
    detail = ", ".join(str(ref) for ref in components)
    return QLResult(lo, hi, (
        Certificate("sod-max", _CITE_SOD, f"in [{lo},{hi}] (max over {detail})"),))


def rule_twisted_upper(index2: bool, base: QLResult) -> Optional[QLResult]:
    """An index-2 Brauer class never raises the dimension past the
    untwisted value."""
    if not index2:
        return None
    return QLResult(0, base.hi, (
        Certificate("twisted-index2-upper", _CITE_TWISTED, f"<= {base.hi}"),))


def rule_torsion_order(v: VarietyData) -> Optional[TorsionStatement]:
    """With a degree-N rational decomposition of the diagonal, the top
    finite-coefficient K-group is N-torsion and the next one N^2-torsion;
    N = 1 therefore chops two degrees off the dimension."""
    f = v.flags
    if f.stably_rational is True or f.rational is True:
        order = 1
    elif f.unirational_degree is not None:
        order = f.unirational_degree
    else:
        return None
    d = v.dim
    if d < 2:
        return None
    if order == 1:
        lines = (f"(K/tau)_{d}(X, Z/m) = 0 for every m",
                 f"(K/tau)_{d - 1}(X, Z/m) = 0 for every m")
        upper: Optional[int] = d - 2
        bound = f"<= {upper}"
    else:
        lines = (f"(K/tau)_{d}(X, Z/m) is {order}-torsion",
                 f"(K/tau)_{d - 1}(X, Z/m) is {order * order}-torsion",
                 f"both vanish when m is prime to {order}")
        upper = None
        bound = f"{order}-torsion in the top two degrees (no interval bound)"
    return TorsionStatement(order, lines, upper,
                            Certificate("diagonal-torsion", _CITE_DIAG, bound))


def rule_twisted_enriques_chain(v: VarietyData, twist: Twist,
                                base: Optional[QLResult] = None) -> QLResult:
    """Decide the twisted dimension by computing the topological K-theory of
    the associated etale P^1-bundle.

    Runs the Gysin sequence for the bundle, folds both ordinary K-theory
    spectral sequences, and splits off the untwisted summand.  If the twisted
    part has zero odd K-theory and torsion-free even K-theory, and the
    comparison map out of K_0 is known surjective, the twisted dimension is 0.
    Any failing or unverifiable premise falls back to the index-2 upper bound.
    """
    if base is None:
        base = combine(v)
    upper = rule_twisted_upper(twist.index == 2, base)
    if upper is None:
        fallback_cert = Certificate(
            "twisted-p1-chain", _CITE_CHAIN,
            f"undetermined (no index-2 bound; index is {twist.index})")
        return QLResult(0, v.dim, (fallback_cert,))
    fallback = QLResult(0, upper.hi, upper.certificates + (
        Certificate("twisted-p1-chain", _CITE_CHAIN,
                    "undetermined (chain premises not verified)"),))
    try:
        hp = gysin_p1(v.h_int, dict(twist.cup))
        split = SplitPolicy.assume_split()
        even_x, odd_x = ahss_ku(v.h_int, split)
        even_p, odd_p = ahss_ku(hp, split)
        even_t = subtract_summand(even_p.resolved, even_x.resolved)
        odd_t = subtract_summand(odd_p.resolved, odd_x.resolved)
    except (GysinError, ValueError):
        return fallback
    if odd_t.is_zero and even_t.is_torsion_free \
            and v.flags.k0_to_ku0_surjective is True and upper.hi <= 2:
        return QLResult(0, 0, (
            Certificate("twisted-p1-chain", _CITE_CHAIN,
                        f"= 0 (twisted KU^even = {even_t}, KU^odd = 0, "
                        "comparison map surjective)"),) + upper.certificates)
    return fallback


# ---------------------------------------------------------------------------
# the combiner


_CRITERIA = {2: qldim_surface, 3: qldim_3fold_rc, 4: qldim_4fold_rc}


def _pipeline_result(v: VarietyData) -> Optional[QLResult]:
    try:
        page = build_bloch_ogus_page(v)
    except ValueError:
        return None
    profile = ktau_profile(ktau_e2(page))
    lo, hi = profile.lower_bound(), profile.upper_bound()
    return QLResult(lo, hi, (
        Certificate("specseq-profile", _CITE_PROFILE, f"in [{lo},{hi}]"),))


def _needs_resolver(components: Sequence[ComponentRef]) -> bool:
    return any(ref.kind in ("variety", "twisted_variety") for ref in components)


def combine(v: VarietyData,
            resolve: Optional[Callable[[ComponentRef], QLResult]] = None,
            ) -> QLResult:
    """Intersect every applicable rule with the universal range [0, dim].

    An empty intersection means the catalog data is inconsistent; the error
    names the two certificates that cannot both hold.
    """
    results: list[QLResult] = [QLResult(0, v.dim, (
        Certificate("ql-range", _CITE_RANGE, f"in [0,{v.dim}]"),))]

    criterion = _CRITERIA.get(v.dim)
    if criterion is not None:
        results.append(criterion(v))
    for rule in (rule_hodge_lower, rule_rational_upper, rule_conic_upper):
        r = rule(v)
        if r is not None:
            results.append(r)
    ts = rule_torsion_order(v)
    if ts is not None:
        hi = ts.upper if ts.upper is not None else v.dim
        results.append(QLResult(0, hi, (ts.certificate,)))
    if v.sod and (resolve is not None or not _needs_resolver(v.sod)):
        results.append(rule_sod(v.sod, resolve))
    pipeline = _pipeline_result(v)
    if pipeline is not None:
        results.append(pipeline)

    lo, hi = 0, v.dim
    lo_cert = hi_cert = results[0].certificates[0]
    certs: list[Certificate] = []
    for r in results:
        certs.extend(r.certificates)
        if r.lo > lo:
            lo, lo_cert = r.lo, r.certificates[0]
        if r.hi < hi:
            hi, hi_cert = r.hi, r.certificates[0]
    if lo > hi:
        raise ValueError(
            f"inconsistent catalog data for {v.name}: "
            f"{lo_cert.rule} forces dimQL >= {lo} "
            f"but {hi_cert.rule} forces dimQL <= {hi}")
    return QLResult(lo, hi, tuple(certs))
