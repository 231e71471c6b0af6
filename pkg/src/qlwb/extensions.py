"""Short exact sequences of finitely generated abelian groups, with honest
bookkeeping of extension ambiguity.

Given 0 -> S -> E -> Q -> 0, the middle E is pinned by (S, Q) exactly when
Ext^1(Q, S) = 0; otherwise several middles occur and picking the split one is
a policy decision, not a theorem.  `GroupUpToExtension` records the split
candidate's rank and torsion order (which every candidate shares... with one
caveat: for non-split extensions with free sub the *actual* torsion of E can
be smaller, as in 0 -> Z -> Z -> Z/2 -> 0.  The reported rank and torsion
order are those of the associated graded S + Q, which is what the downstream
consumers — vanishing tests, order counts of mod-m groups — need).
"""
from __future__ import annotations

from math import gcd
from typing import Optional

from .groups import FgAbGroup, ZERO

__all__ = [
    "GroupUpToExtension",
    "SplitPolicy",
    "TriState",
    "ext1_vanishes",
    "h1h4_from_flags",
    "middle_of_short_exact",
    "sheaf_uct",
]


class TriState:
    """Zero / Nonzero(witness) / Undetermined(reason).

    Encodes "iff"-style criteria where missing data must propagate as
    Undetermined rather than collapsing to False.
    """

    __slots__ = ("kind", "witness", "reason")

    def __init__(self, kind: str, witness=None, reason: str = ""):
        if kind not in ("zero", "nonzero", "undetermined"):
            raise ValueError(f"bad TriState kind {kind!r}")
        self.kind = kind
        self.witness = witness
        self.reason = reason

    @classmethod
    def zero(cls) -> "TriState":
        return cls("zero")

    @classmethod
    def nonzero(cls, witness=None) -> "TriState":
        """witness: an FgAbGroup that injects, or a lower bound on the order."""
        return cls("nonzero", witness=witness)

    @classmethod
    def undetermined(cls, reason: str = "") -> "TriState":
        return cls("undetermined", reason=reason)

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    @property
    def is_nonzero(self) -> bool:
        return self.kind == "nonzero"

    @property
    def is_undetermined(self) -> bool:
        return self.kind == "undetermined"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TriState):
            return NotImplemented
        return (self.kind, self.witness, self.reason) == \
            (other.kind, other.witness, other.reason)

    def __hash__(self) -> int:
        return hash((self.kind, self.witness, self.reason))

    def __str__(self) -> str:
        if self.kind == "zero":
            return "0"
        if self.kind == "nonzero":
            return f"nonzero ({self.witness})" if self.witness is not None \
                else "nonzero"
        return f"undetermined: {self.reason}" if self.reason else "undetermined"

    __repr__ = __str__


class SplitPolicy:
    """How to resolve a genuinely ambiguous extension.

    ``assume_split`` takes S + Q and flags the guess; ``refuse`` leaves the
    middle unresolved; ``override`` supplies a named group backed by a
    citation elsewhere.
    """

    __slots__ = ("mode", "value")

    def __init__(self, mode: str, value: Optional[FgAbGroup] = None):
        if mode not in ("assume_split", "refuse", "override"):
            raise ValueError(f"bad policy mode {mode!r}")
        if (value is not None) != (mode == "override"):
            raise ValueError("override requires a group; other modes forbid one")
        self.mode = mode
        self.value = value

    @classmethod
    def assume_split(cls) -> "SplitPolicy":
        return cls("assume_split")

    @classmethod
    def refuse(cls) -> "SplitPolicy":
        return cls("refuse")

    @classmethod
    def override(cls, group: FgAbGroup) -> "SplitPolicy":
        return cls("override", group)

    def __repr__(self) -> str:
        if self.mode == "override":
            return f"SplitPolicy.override({self.value!r})"
        return f"SplitPolicy.{self.mode}()"


class GroupUpToExtension:
    """The middle of 0 -> sub -> E -> quot -> 0, possibly unresolved.

    Rank, torsion order (of the split candidate), zero-ness, and
    torsion-freeness are determined by the ends alone and are available
    whether or not the extension was resolved.
    """

    __slots__ = ("sub", "quot", "resolved", "ambiguity_flag")

    def __init__(self, sub: FgAbGroup, quot: FgAbGroup,
                 resolved: Optional[FgAbGroup], ambiguity_flag: bool):
        self.sub = sub
        self.quot = quot
        self.resolved = resolved
        self.ambiguity_flag = ambiguity_flag

    @property
    def rank(self) -> int:
        return self.sub.rank + self.quot.rank

    @property
    def torsion_order(self) -> int:
        return self.sub.torsion_order * self.quot.torsion_order

    @property
    def is_zero(self) -> bool:
        return self.sub.is_zero and self.quot.is_zero

    @property
    def is_torsion_free(self) -> bool:
        return self.sub.is_torsion_free and self.quot.is_torsion_free

    @property
    def candidate(self) -> FgAbGroup:
        """The resolved group if known, else the split candidate."""
        return self.resolved if self.resolved is not None \
            else self.sub + self.quot

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupUpToExtension):
            return NotImplemented
        return (self.sub, self.quot, self.resolved, self.ambiguity_flag) == \
            (other.sub, other.quot, other.resolved, other.ambiguity_flag)

    def __hash__(self) -> int:
        return hash((self.sub, self.quot, self.resolved, self.ambiguity_flag))

    def __str__(self) -> str:
        text = str(self.candidate)
        return f"{text} [extension-ambiguous]" if self.ambiguity_flag else text

    def __repr__(self) -> str:
        return (f"GroupUpToExtension(sub={self.sub!r}, quot={self.quot!r}, "
                f"resolved={self.resolved!r}, ambiguous={self.ambiguity_flag})")


def ext1_vanishes(quot: FgAbGroup, sub: FgAbGroup) -> bool:
    """Whether Ext^1(quot, sub) = 0, i.e. the middle is forced to split.

    Ext^1(Z/n, Z) = Z/n and Ext^1(Z/n, Z/d) = Z/gcd(n, d), so the Ext group
    vanishes iff quot is torsion-free, or sub is finite with torsion coprime
    to that of quot.
    """
    if quot.is_torsion_free:
        return True
    if sub.rank:
        return False
    return gcd(quot.exponent, sub.exponent) == 1


_DEFAULT = SplitPolicy.assume_split()


def middle_of_short_exact(sub: FgAbGroup, quot: FgAbGroup,
                          policy: SplitPolicy = _DEFAULT) -> GroupUpToExtension:
    """Solve 0 -> sub -> E -> quot -> 0 for E, tracking ambiguity.

    The result is resolved without a flag whenever the extension is forced
    (an end vanishes, the quotient is free, or Ext^1(quot, sub) = 0).
    Otherwise the policy decides: assume_split resolves to sub + quot with
    the ambiguity flag set; refuse leaves it unresolved; a catalog override
    must match the forced rank and torsion order.
    """
    if sub.is_zero:
        return GroupUpToExtension(sub, quot, quot, False)
    if quot.is_zero:
        return GroupUpToExtension(sub, quot, sub, False)
    if ext1_vanishes(quot, sub):
        return GroupUpToExtension(sub, quot, sub + quot, False)
    if policy.mode == "assume_split":
        return GroupUpToExtension(sub, quot, sub + quot, True)
    if policy.mode == "refuse":
        return GroupUpToExtension(sub, quot, None, True)
    named = policy.value
    if named.rank != sub.rank + quot.rank or \
            named.torsion_order != sub.torsion_order * quot.torsion_order:
        raise ValueError(
            f"override {named} does not match rank "
            f"{sub.rank + quot.rank} and torsion order "
            f"{sub.torsion_order * quot.torsion_order}")
    return GroupUpToExtension(sub, quot, named, False)


def sheaf_uct(hi_z: FgAbGroup, hnext_z: FgAbGroup, m: int,
              policy: SplitPolicy = _DEFAULT) -> GroupUpToExtension:
    """Mod-m coefficients from integral data in consecutive degrees:

        0 -> H^i(Z)/m -> H^i(Z/m) -> H^{i+1}(Z)[m] -> 0.

    The result has order m^rank(H^i) * |tors(H^i)/m| * |H^{i+1}[m]|.
    """
    if m < 2:
        raise ValueError("coefficient modulus must be >= 2")
    return middle_of_short_exact(hi_z.tensor_zmod(m), hnext_z.m_torsion(m),
                                 policy)


def h1h4_from_flags(n2h5_full: Optional[bool],
                    alg_eq_hom_ch1: Optional[bool],
                    h5: Optional[FgAbGroup],
                    coker_data: Optional[FgAbGroup] = None) -> TriState:
    """Vanishing of the degree-(1,4) entry of the integral page of a
    rationally connected 4-fold, decided from two cycle-theoretic flags:
    whether the coniveau-2 part fills H^5, and whether algebraic and
    homological equivalence agree for 1-cycles.

    Zero iff both hold; a single failing flag already forces a nonzero
    entry; unknown flags propagate as Undetermined.
    """
    if n2h5_full is False or alg_eq_hom_ch1 is False:
        witness = coker_data
        if witness is None and n2h5_full is False and h5 is not None \
                and not h5.is_zero:
            witness = None  # a nonzero quotient of H^5 exists; size unknown
        return TriState.nonzero(witness)
    if n2h5_full is None or alg_eq_hom_ch1 is None:
        missing = [name for name, val in
                   (("n2h5_full", n2h5_full), ("alg_eq_hom_ch1", alg_eq_hom_ch1))
                   if val is None]
        return TriState.undetermined("missing flag(s): " + ", ".join(missing))
    return TriState.zero()
