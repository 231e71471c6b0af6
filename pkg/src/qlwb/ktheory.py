"""Integral algebraic K-groups assembled from topological and Chow input.

The K-groups that come out of the comparison machinery are not finitely
generated: they mix a finitely generated piece with copies of Q/Z and with
uniquely divisible groups (intermediate Jacobians, Chow groups of cycles
algebraically equivalent to zero, rational K-theory) that admit no finite
description.  ``KGroupExpr`` is the little expression language for such
groups: free rank, finite torsion, Q/Z-rank, and a tuple of opaque names
for the divisible summands.

Three assembly steps produce these expressions:

* ``assemble_high_kn`` -- in degrees ``n >= max(1, d - 2)``, where ``d`` is
  an upper bound for the comparison dimension of the object, the integral
  K-group is ``tors(KU^{-n})  +  (Q/Z)^{rank KU^{-n-1}}  +  (rational part)``.
* ``k0_filtration`` -- K_0 via the filtration by codimension of support.
  The graded pieces are the Chow groups, but the comparison surjection
  ``CH^i ->> gr^i`` only has ``(i-1)!``-torsion kernel, so each codimension
  whose Chow group can share torsion with ``(i-1)!`` needs an explicit
  isomorphism certificate before the sum is taken at face value.
* ``strip_exceptional`` -- passes from K_0 of a variety to K_0 of the
  complement of an exceptional collection; each exceptional object splits
  off one Z, and a uniquely divisible summand admits no nonzero map to Z,
  so removing the Z's is canonical.

``component_k_table`` chains the three into the full table of K-groups of
an admissible component cut out by a semiorthogonal decomposition.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from .extensions import SplitPolicy, TriState
from .groups import FgAbGroup, subtract_summand
from .pages import ahss_ku
from .variety import ChowData, ChowEntry, VarietyData

__all__ = [
    "KGroupExpr",
    "K0Result",
    "assemble_high_kn",
    "k0_filtration",
    "strip_exceptional",
    "adams_annihilator",
    "ch1_torsion_free",
    "phantom_vanishing",
    "component_k_table",
]


class KGroupExpr:
    """Z^a + (finite torsion) + (Q/Z)^b + named uniquely divisible summands.

    The divisible names are opaque symbols ("IJ(X)", "CH_1(X)_hom", ...);
    they are kept in sorted order so that equality is structural.

    >>> print(KGroupExpr(free_rank=2, divisible=("IJ(X)",)))
    Z^2 + IJ(X)
    >>> print(KGroupExpr(finite=FgAbGroup.cyclic(2), qz_rank=12,
    ...                  divisible=("K_n(X,Q)",)))
    Z/2 + (Q/Z)^12 + K_n(X,Q)
    """

    __slots__ = ("free_rank", "finite", "qz_rank", "divisible")

    def __init__(self, free_rank: int = 0, finite: Optional[FgAbGroup] = None,
                 qz_rank: int = 0, divisible: Sequence[str] = ()):
        finite = finite if finite is not None else FgAbGroup()
        if free_rank < 0:
            raise ValueError(f"free_rank must be >= 0, got {free_rank}")
        if qz_rank < 0:
            raise ValueError(f"qz_rank must be >= 0, got {qz_rank}")
        if finite.rank != 0:
            raise ValueError("finite part must be a torsion group; "
                             "put free summands in free_rank")
        self.free_rank = free_rank
        self.finite = finite
        self.qz_rank = qz_rank
        self.divisible = tuple(sorted(divisible))

    @classmethod
    def zero(cls) -> "KGroupExpr":
        return cls()

    @classmethod
    def free(cls, n: int) -> "KGroupExpr":
        return cls(free_rank=n)

    @property
    def is_zero(self) -> bool:
        return (self.free_rank == 0 and self.finite.is_zero
                and self.qz_rank == 0 and not self.divisible)

    def _key(self):
        return (self.free_rank, self.finite, self.qz_rank, self.divisible)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KGroupExpr):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self) -> int:
        return hash(self._key())

    def __repr__(self) -> str:
        return (f"KGroupExpr(free_rank={self.free_rank}, "
                f"finite={self.finite!r}, qz_rank={self.qz_rank}, "
                f"divisible={self.divisible!r})")

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        if not self.finite.is_zero:
            parts.append(str(self.finite))
        if self.qz_rank == 1:
            parts.append("Q/Z")
        elif self.qz_rank > 1:
            parts.append(f"(Q/Z)^{self.qz_rank}")
        parts.extend(self.divisible)
        return " + ".join(parts) if parts else "0"


def assemble_high_kn(ku_even: FgAbGroup, ku_odd: FgAbGroup, qldim: int,
                     n: int, *,
                     rational_symbol: str = "K_n(X,Q)") -> KGroupExpr:
    """K_n in the range where the comparison map determines it.

    For ``n >= max(1, qldim - 2)`` the integral K-group splits as the
    torsion of ``KU^{-n}``, a ``(Q/Z)``-power of rank ``rank KU^{-n-1}``,
    and the rational K-group (kept symbolic).  Below that threshold the
    formula is simply not asserted, so asking for it is an error.

    >>> assemble_high_kn(FgAbGroup.free(2), FgAbGroup.free(6), 1, 1)
    KGroupExpr(free_rank=0, finite=FgAbGroup(0, ()), qz_rank=2, \
divisible=('K_n(X,Q)',))
    """
    if qldim < 0:
        raise ValueError(f"qldim must be >= 0, got {qldim}")
    threshold = max(1, qldim - 2)
    if n < threshold:
        raise ValueError(
            f"assembly formula is only valid for n >= {threshold} "
            f"(comparison dimension {qldim}), got n = {n}")
    ku_minus_n = ku_even if n % 2 == 0 else ku_odd
    ku_minus_n1 = ku_odd if n % 2 == 0 else ku_even
    return KGroupExpr(finite=ku_minus_n.torsion_part(),
                      qz_rank=ku_minus_n1.rank,
                      divisible=(rational_symbol,))


@dataclass(frozen=True)
class K0Result:
    """K_0 via the support filtration, with an honesty flag.

    ``exact`` is True when every graded surjection CH^i ->> gr^i has been
    certified an isomorphism; otherwise ``uncertified`` lists the offending
    codimensions and ``expr`` is only an upper-bound shape ("up to the
    filtration"), never to be consumed silently.
    """

    expr: KGroupExpr
    exact: bool
    uncertified: tuple[int, ...] = ()


def _codim_certified(i: int, entry: ChowEntry,
                     accepted: frozenset[str]) -> bool:
    fac = math.factorial(i - 1)
    if fac == 1:
        return True
    if math.gcd(entry.torsion.exponent, fac) > 1:
        pass  # finite torsion meets the kernel bound
    elif entry.divisible and entry.divisible_torsion_free is not True:
        pass  # a divisible group has m-torsion for every m unless declared not to
    else:
        return True
    return entry.certificate is not None and entry.certificate in accepted


def k0_filtration(chow: ChowData, split_certificates: Sequence[str] = (), *,
                  dim: Optional[int] = None) -> K0Result:
    """Sum the Chow groups along the codimension-of-support filtration.

    The kernel of ``CH^i ->> F^i/F^{i+1}`` is ``(i-1)!``-torsion, so the sum
    is certified exact codimension by codimension: automatically when
    ``(i-1)! = 1`` or when CH^i provably has no ``(i-1)!``-torsion, and
    otherwise only if the entry names a certificate appearing in
    ``split_certificates``.  CH^0 = Z may be left implicit.

    >>> chow = ChowData({1: ChowEntry(free_rank=1),
    ...                  2: ChowEntry(free_rank=1, divisible=("IJ(X)",),
    ...                               divisible_torsion_free=False),
    ...                  3: ChowEntry(free_rank=1)})
    >>> res = k0_filtration(chow)
    >>> res.exact, str(res.expr)
    (True, 'Z^4 + IJ(X)')
    """
    entries = dict(chow.entries)
    zero_entry = entries.setdefault(0, ChowEntry(free_rank=1))
    if (zero_entry.free_rank != 1 or not zero_entry.torsion.is_zero
            or zero_entry.divisible):
        raise ValueError("CH^0 must be Z for a connected variety")
    top = max(entries)
    if dim is None:
        dim = top
    if top > dim:
        raise ValueError(f"Chow entry in codimension {top} exceeds "
                         f"dimension {dim}")
    missing = [i for i in range(dim + 1) if i not in entries]
    if missing:
        raise ValueError(f"Chow data missing codimension(s) {missing}")

    free = 0
    finite = FgAbGroup()
    divisible: list[str] = []
    accepted = frozenset(split_certificates)
    uncertified = []
    for i in range(dim + 1):
        e = entries[i]
        free += e.free_rank
        finite = finite.direct_sum(e.torsion)
        divisible.extend(e.divisible)
        if i >= 1 and not _codim_certified(i, e, accepted):
            uncertified.append(i)

    expr = KGroupExpr(free_rank=free, finite=finite,
                      divisible=tuple(divisible))
    return K0Result(expr=expr, exact=not uncertified,
                    uncertified=tuple(uncertified))


def strip_exceptional(k0: KGroupExpr, e: int) -> KGroupExpr:
    """Remove the Z-summands contributed by ``e`` exceptional objects.

    Canonical because a uniquely divisible group admits no nonzero map
    to Z: the exceptional Z's can only sit inside the free part.

    >>> k0 = KGroupExpr(free_rank=4, divisible=("IJ(X)",))
    >>> print(strip_exceptional(k0, 2))
    Z^2 + IJ(X)
    """
    if e < 0:
        raise ValueError(f"cannot strip a negative count ({e})")
    if k0.free_rank < e:
        raise ValueError(
            f"inconsistent SOD data: cannot strip {e} exceptional Z's "
            f"from free rank {k0.free_rank}")
    return KGroupExpr(free_rank=k0.free_rank - e, finite=k0.finite,
                      qz_rank=k0.qz_rank, divisible=k0.divisible)


def adams_annihilator(wt_target: int, wt_source: int,
                      ks: Iterable[int]) -> int:
    """Order bound on a differential between Adams eigenspaces.

    The Adams operation psi_k acts by ``k^w`` on weight ``w``, so a map
    commuting with all psi_k from weight ``wt_source`` to weight
    ``wt_target`` is annihilated by ``k^{wt_target} - k^{wt_source}`` for
    every k; the useful bound is the gcd over the supplied k's.  Equal
    weights give 0, meaning no constraint.

    >>> adams_annihilator(3, 2, [2, 3])   # gcd(4, 18)
    2
    >>> adams_annihilator(3, 1, [2, 3])   # gcd(6, 24)
    6
    """
    ks = list(ks)
    if not ks:
        raise ValueError("need at least one Adams operation")
    if any(k < 2 for k in ks):
        raise ValueError(f"Adams operations need k >= 2, got {ks}")
    if wt_target < 0 or wt_source < 0:
        raise ValueError("weights must be non-negative")
    ann = 0
    for k in ks:
        ann = math.gcd(ann, abs(k ** wt_target - k ** wt_source))
    return ann


def ch1_torsion_free(ch0_trivial: Optional[bool], h5_zero: Optional[bool],
                     h3_homology_zero: Optional[bool]) -> TriState:
    """Is the torsion of CH_1(X)_alg zero?

    Two sufficient criteria, both needing CH_0(X) = Z: vanishing of
    H^5(X,Z) (which addresses CH^3_alg), or vanishing of H_3(X,Z) (which
    addresses CH_1_alg).  One-directional: failure of the hypotheses says
    nothing, so everything else is Undetermined.
    """
    if ch0_trivial is not True:
        return TriState.undetermined("needs CH_0(X) = Z")
    if h5_zero is True or h3_homology_zero is True:
        return TriState.zero()
    return TriState.undetermined(
        "needs H^5(X,Z) = 0 or H_3(X,Z) = 0 in addition to CH_0(X) = Z")


def phantom_vanishing(k0: KGroupExpr, qldim_hi: int) -> TriState:
    """Do all K-groups of the component vanish?

    A phantom (K_0 = 0) whose comparison dimension is at most 0 has
    K_n = 0 for every n.  A nonzero K_0, or an upper bound that does not
    reach 0, leaves the question open here.
    """
    if not k0.is_zero:
        return TriState.undetermined("K_0 is not zero")
    if qldim_hi > 0:
        return TriState.undetermined(
            f"comparison-dimension bound {qldim_hi} does not reach 0")
    return TriState.zero()


def component_k_table(v: VarietyData, qldim_hi: int, ns: Iterable[int], *,
                      ku: Optional[tuple[FgAbGroup, FgAbGroup]] = None,
                      policy: Optional[SplitPolicy] = None,
                      split_certificates: Sequence[str] = (),
                      rational_symbol: str = "K_n(X,Q)",
                      ) -> dict[int, KGroupExpr]:
    """K-groups of the distinguished component of a semiorthogonal
    decomposition, indexed by degree.

    The decomposition must consist of exactly one non-exceptional component
    plus exceptional objects (curve factors are handled in degrees >= 1
    only).  Degree 0 runs ``k0_filtration`` then ``strip_exceptional`` and
    insists the filtration be fully certified; degrees >= 1 apply
    ``assemble_high_kn`` to the component's KU, obtained from the ambient
    KU by removing one even Z per exceptional object (and a genus-g curve's
    (Z^2, Z^{2g}) pair).  ``qldim_hi`` is any upper bound valid for the
    component; the bound for the ambient variety always works, since the
    comparison dimension of a component never exceeds it.
    """
    if not v.sod:
        raise ValueError(f"{v.name}: component table needs a semiorthogonal "
                         "decomposition")
    exceptional = [c for c in v.sod if c.kind == "exceptional"]
    curves = [c for c in v.sod if c.kind == "curve"]
    rest = [c for c in v.sod if c.kind not in ("exceptional", "curve")]
    if len(rest) != 1:
        raise ValueError(
            f"{v.name}: need exactly one non-exceptional component to "
            f"solve for, found {len(rest)}")

    if ku is None:
        gue_even, gue_odd = ahss_ku(v.h_int,
                                    policy or SplitPolicy.assume_split())
        ku_even, ku_odd = gue_even.resolved, gue_odd.resolved
        if ku_even is None or ku_odd is None:
            raise ValueError(f"{v.name}: KU extension problem unresolved; "
                             "supply ku= explicitly")
    else:
        ku_even, ku_odd = ku

    drop_even = len(exceptional) + 2 * len(curves)
    drop_odd = sum(2 * c.genus for c in curves)
    comp_even = subtract_summand(ku_even, FgAbGroup.free(drop_even))
    comp_odd = subtract_summand(ku_odd, FgAbGroup.free(drop_odd))

    table: dict[int, KGroupExpr] = {}
    for n in ns:
        if n < 0:
            raise ValueError(f"K_{n} is not defined here")
        if n == 0:
            if curves:
                raise ValueError(
                    f"{v.name}: K_0 of the component is not computed when "
                    "the decomposition has curve factors")
            if v.chow is None:
                raise ValueError(f"{v.name}: the K_0 row needs Chow data")
            res = k0_filtration(v.chow, split_certificates, dim=v.dim)
            if not res.exact:
                raise ValueError(
                    f"{v.name}: K_0 filtration not certified in "
                    f"codimension(s) {list(res.uncertified)}")
            table[0] = strip_exceptional(res.expr, len(exceptional))
        else:
            table[n] = assemble_high_kn(comp_even, comp_odd, qldim_hi, n,
                                        rational_symbol=rational_symbol)
    return table
