"""Bigraded pages over a variety: the integral cycle-theoretic table, its
mod-m counterpart, vanishing profiles across all moduli, Atiyah-Hirzebruch
folding for topological K-theory, and the Gysin sequence of an etale
P^1-bundle attached to an index-2 Brauer class.

Differentials are never modelled as maps.  An entry survives only when every
differential in or out of it has a source or target that is certified zero;
anything weaker propagates as undetermined.  Missing input data likewise
produces undetermined entries, never silent zeros.
"""
from __future__ import annotations

from typing import Mapping, Optional, Union

from .extensions import (
    GroupUpToExtension,
    SplitPolicy,
    TriState,
    h1h4_from_flags,
    middle_of_short_exact,
    sheaf_uct,
)
from .groups import (
    FgAbGroup,
    GradedAb,
    GroupHom,
    IntMatrix,
    Z,
    ZERO,
    torsion_embeds,
)
from .variety import VarietyData

__all__ = [
    "BigradedPage",
    "GysinError",
    "KtauProfile",
    "SymbolicUct",
    "UnknownEntry",
    "ahss_ku",
    "build_bloch_ogus_page",
    "entry_state",
    "gysin_p1",
    "ktau_e2",
    "ktau_next",
    "ktau_profile",
    "ktau_top",
    "ku_mod_m",
]


class GysinError(ValueError):
    """No abelian group satisfies the constraints of a Gysin window."""


# ---------------------------------------------------------------------------
# entry types


class UnknownEntry:
    """A page entry the input data does not determine.

    `known_nonzero` and `has_torsion` record facts certified despite the
    unknown shape (on a mod-m page, `known_nonzero` means nonzero for some
    modulus m).
    """

    __slots__ = ("note", "known_nonzero", "has_torsion")

    def __init__(self, note: str = "", known_nonzero: Optional[bool] = None,
                 has_torsion: Optional[bool] = None):
        self.note = note
        self.known_nonzero = known_nonzero
        self.has_torsion = has_torsion

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, UnknownEntry):
            return NotImplemented
        return (self.note, self.known_nonzero, self.has_torsion) == \
            (other.note, other.known_nonzero, other.has_torsion)

    def __hash__(self) -> int:
        return hash((self.note, self.known_nonzero, self.has_torsion))

    def __str__(self) -> str:
        return "?"

    def __repr__(self) -> str:
        return (f"UnknownEntry({self.note!r}, "
                f"known_nonzero={self.known_nonzero}, "
                f"has_torsion={self.has_torsion})")


class SymbolicUct:
    """A mod-m entry kept symbolic in m: the middle of

        0 -> (mod_side)/m -> E(m) -> (tors_side)[m] -> 0.

    Vanishes for every m iff mod_side = 0 and tors_side is torsion-free;
    has a nonzero value for some m otherwise.
    """

    __slots__ = ("mod_side", "tors_side")

    def __init__(self, mod_side: FgAbGroup, tors_side: FgAbGroup):
        self.mod_side = mod_side
        self.tors_side = tors_side

    @property
    def vanishes_for_all_m(self) -> bool:
        return self.mod_side.is_zero and self.tors_side.is_torsion_free

    @property
    def nonzero_for_some_m(self) -> bool:
        return not self.vanishes_for_all_m

    @property
    def nonzero_for_all_m(self) -> bool:
        return self.mod_side.rank > 0

    def instantiate(self, m: int,
                    policy: Optional[SplitPolicy] = None) -> GroupUpToExtension:
        if policy is None:
            return sheaf_uct(self.mod_side, self.tors_side, m)
        return sheaf_uct(self.mod_side, self.tors_side, m, policy)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SymbolicUct):
            return NotImplemented
        return (self.mod_side, self.tors_side) == \
            (other.mod_side, other.tors_side)

    def __hash__(self) -> int:
        return hash((self.mod_side, self.tors_side))

    def __str__(self) -> str:
        pieces = []
        if self.mod_side.rank == 1:
            pieces.append("Z/m")
        elif self.mod_side.rank > 1:
            pieces.append(f"(Z/m)^{self.mod_side.rank}")
        if not self.mod_side.is_torsion_free:
            pieces.append(f"({self.mod_side.torsion_part()})/m")
        if not self.tors_side.is_torsion_free:
            pieces.append(f"m-tors({self.tors_side.torsion_part()})")
        return " + ".join(pieces) if pieces else "0"

    def __repr__(self) -> str:
        return f"SymbolicUct({self.mod_side!r}, {self.tors_side!r})"


PageEntry = Union[FgAbGroup, GroupUpToExtension, SymbolicUct, UnknownEntry]


def entry_state(entry: PageEntry) -> TriState:
    """Zero / nonzero / undetermined, reading a symbolic entry across all m."""
    if isinstance(entry, FgAbGroup):
        return TriState.zero() if entry.is_zero else TriState.nonzero(entry)
    if isinstance(entry, GroupUpToExtension):
        return TriState.zero() if entry.is_zero \
            else TriState.nonzero(entry.candidate)
    if isinstance(entry, SymbolicUct):
        if entry.vanishes_for_all_m:
            return TriState.zero()
        return TriState.nonzero(entry)
    if isinstance(entry, UnknownEntry):
        if entry.known_nonzero:
            return TriState.nonzero()
        return TriState.undetermined(entry.note or "entry not determined")
    raise TypeError(f"not a page entry: {entry!r}")


# ---------------------------------------------------------------------------
# the page container


class BigradedPage:
    """A sparse first-quadrant table of page entries.

    Orientation "bloch-ogus" stores entries at (p, q) with 0 <= p <= q <= dim
    (q is the weight); orientation "ktau" stores the mod-m page at (p, j)
    with j = -q, so the diagonal of total degree n collects (p, j) with
    -j - p = n.  Absent keys read as the zero group.
    """

    __slots__ = ("_map", "dim", "coeff", "orientation", "notes")

    def __init__(self, entries: Mapping[tuple[int, int], PageEntry],
                 dim: int, coeff: str = "Z", orientation: str = "bloch-ogus",
                 notes: tuple[str, ...] = ()):
        if orientation not in ("bloch-ogus", "ktau"):
            raise ValueError(f"unknown orientation {orientation!r}")
        if dim < 0:
            raise ValueError("dim must be >= 0")
        kept = {}
        for (p, q), entry in entries.items():
            if not isinstance(entry,
                              (FgAbGroup, GroupUpToExtension, SymbolicUct,
                               UnknownEntry)):
                raise TypeError(f"not a page entry at ({p},{q}): {entry!r}")
            weight = q if orientation == "bloch-ogus" else -q
            if orientation == "ktau" and q > 0:
                raise ValueError(f"ktau rows live at j <= 0, got ({p},{q})")
            if not 0 <= p <= weight <= dim:
                raise ValueError(
                    f"entry ({p},{q}) outside the supported region "
                    f"0 <= p <= {'q' if orientation == 'bloch-ogus' else '-j'}"
                    f" <= {dim}")
            if isinstance(entry, FgAbGroup) and entry.is_zero:
                continue
            if isinstance(entry, GroupUpToExtension) and entry.is_zero:
                continue
            if isinstance(entry, SymbolicUct) and entry.vanishes_for_all_m:
                continue
            kept[(p, q)] = entry
        self._map = kept
        self.dim = dim
        self.coeff = coeff
        self.orientation = orientation
        self.notes = tuple(notes)

    def entry(self, p: int, q: int) -> PageEntry:
        return self._map.get((p, q), ZERO)

    def nonzero_entries(self) -> tuple[tuple[tuple[int, int], PageEntry], ...]:
        return tuple(sorted(self._map.items()))

    def render(self) -> str:
        row_char = "q" if self.orientation == "bloch-ogus" else "j"
        if self.orientation == "bloch-ogus":
            rows = list(range(self.dim, -1, -1))
        else:
            rows = list(range(0, -self.dim - 1, -1))
        cols = list(range(0, self.dim + 1))
        grid = [[f"{row_char}\\p"] + [str(p) for p in cols]]
        for q in rows:
            cells = [str(q)]
            for p in cols:
                e = self.entry(p, q)
                cells.append("." if isinstance(e, FgAbGroup) and e.is_zero
                             else str(e))
            grid.append(cells)
        widths = [max(len(row[c]) for row in grid) for c in range(len(cols) + 1)]
        lines = []
        for r, row in enumerate(grid):
            cells = [row[0].rjust(widths[0])]
            cells += [row[c].ljust(widths[c]) for c in range(1, len(row))]
            lines.append("  ".join(cells).rstrip())
        return "\n".join(lines)

    def __repr__(self) -> str:
        return (f"BigradedPage({len(self._map)} entries, dim={self.dim}, "
                f"coeff={self.coeff!r}, orientation={self.orientation!r})")


# ---------------------------------------------------------------------------
# integral tables


def _unknown_page(v: VarietyData, note: str) -> BigradedPage:
    entries: dict[tuple[int, int], PageEntry] = {(0, 0): Z, (v.dim, v.dim): Z}
    for q in range(1, v.dim + 1):
        for p in range(0, q + 1):
            if (p, q) != (v.dim, v.dim):
                entries[(p, q)] = UnknownEntry(note)
    return BigradedPage(entries, v.dim, notes=(note,))


def _surface_page(v: VarietyData) -> BigradedPage:
    h = v.h_int
    entries: dict[tuple[int, int], PageEntry] = {
        (0, 0): Z,
        (0, 1): h.group(1),
        (1, 2): h.group(3),
        (2, 2): Z,
    }
    notes: list[str] = []
    if v.ns_rank is None:
        note = ("Neron-Severi rank not recorded; entries (1,1) and (0,2) "
                "left undetermined")
        # the Neron-Severi group contains an ample class and all of the
        # torsion of H^2; the transcendental quotient is torsion-free
        entries[(1, 1)] = UnknownEntry(
            note, known_nonzero=True,
            has_torsion=None if not h.group(2).is_torsion_free else False)
        entries[(0, 2)] = UnknownEntry(note, has_torsion=False)
        notes.append(note)
    else:
        entries[(1, 1)] = FgAbGroup(v.ns_rank, h.group(2).divisors)
        entries[(0, 2)] = FgAbGroup(v.betti(2) - v.ns_rank)
    return BigradedPage(entries, 2, notes=tuple(notes))


def _threefold_page(v: VarietyData) -> BigradedPage:
    if not v.flags.rationally_connected:
        return _unknown_page(
            v, "rational connectedness not established; the threefold table "
               "does not apply")
    h = v.h_int
    entries: dict[tuple[int, int], PageEntry] = {
        (0, 0): Z,
        (1, 1): h.group(2),   # the Neron-Severi group is all of H^2
        (1, 2): h.group(3),
        (2, 2): h.group(4),   # codim-2 cycles mod algebraic equivalence
        (3, 3): Z,
    }
    return BigradedPage(entries, 3)


def _fourfold_page(v: VarietyData) -> BigradedPage:
    f = v.flags
    if not f.rationally_connected:
        return _unknown_page(
            v, "rational connectedness not established; the fourfold table "
               "does not apply")
    h = v.h_int
    notes: list[str] = []
    entries: dict[tuple[int, int], PageEntry] = {
        (0, 0): Z,
        (1, 1): h.group(2),
        (1, 2): h.group(3),
        (4, 4): Z,
    }

    # (2,2) and (1,3): algebraic part of H^4 and its cokernel
    if f.ihc_h4 and v.hdg4_rank is not None:
        entries[(2, 2)] = FgAbGroup(v.hdg4_rank, h.group(4).divisors)
        entries[(1, 3)] = FgAbGroup(v.betti(4) - v.hdg4_rank)
    elif f.ihc_h4 is False:
        note = "degree-4 integral Hodge conjecture fails: the cokernel of " \
               "the cycle map on H^4 carries nonzero torsion"
        entries[(2, 2)] = UnknownEntry("algebraic part of H^4 not recorded")
        entries[(1, 3)] = UnknownEntry(note, known_nonzero=True,
                                       has_torsion=True)
        notes.append(note)
    else:
        chow2 = v.chow.entry(2) if v.chow else None
        if chow2 is not None and chow2.mod_alg is not None:
            entries[(2, 2)] = chow2.mod_alg
        else:
            entries[(2, 2)] = UnknownEntry(
                "codim-2 cycles mod algebraic equivalence not recorded")
        entries[(1, 3)] = UnknownEntry(
            "algebraic part of H^4 not determined")

    # (2,3): the coniveau-2 part of H^5
    if f.n2h5_full is True:
        entries[(2, 3)] = h.group(5)
    elif f.n2h5_full is False:
        entries[(2, 3)] = UnknownEntry(
            "a proper coniveau-2 subgroup of H^5")
    else:
        entries[(2, 3)] = UnknownEntry("coniveau-2 part of H^5 unknown")

    # (3,3): 1-cycles mod algebraic equivalence
    chow3 = v.chow.entry(3) if v.chow else None
    if chow3 is not None and chow3.mod_alg is not None:
        entries[(3, 3)] = chow3.mod_alg
    elif f.alg_eq_hom_ch1 and f.ihc_h6:
        entries[(3, 3)] = h.group(6)
    else:
        entries[(3, 3)] = UnknownEntry(
            "1-cycles mod algebraic equivalence not determined")

    # (1,4): decided by the two cycle-theoretic flags
    t = h1h4_from_flags(f.n2h5_full, f.alg_eq_hom_ch1, h.group(5))
    if t.is_nonzero:
        entries[(1, 4)] = UnknownEntry(
            "nonzero torsion group measuring the failure of the "
            "coniveau/1-cycle conditions", known_nonzero=True,
            has_torsion=True)
    elif t.is_undetermined:
        entries[(1, 4)] = UnknownEntry(t.reason)

    # (2,4): vanishes iff 1-cycles surject onto H^6
    if f.ihc_h6 is True:
        pass
    elif f.ihc_h6 is False:
        entries[(2, 4)] = UnknownEntry(
            "nonzero finitely generated torsion group: 1-cycles miss part "
            "of H^6", known_nonzero=True, has_torsion=True)
    else:
        entries[(2, 4)] = UnknownEntry(
            "torsion, finitely generated; zero iff 1-cycles surject "
            "onto H^6")

    return BigradedPage(entries, 4, notes=tuple(notes))


def _fivefold_page(v: VarietyData) -> BigradedPage:
    f = v.flags
    chow = v.chow
    pattern = (f.ch0_known_trivial and f.n2h5_full and f.alg_eq_hom_ch1
               and chow is not None)
    if not pattern:
        return _unknown_page(
            v, "the fivefold table needs trivial CH_0, the coniveau and "
               "1-cycle flags, and Chow data")
    h = v.h_int
    entries: dict[tuple[int, int], PageEntry] = {
        (0, 0): Z,
        (1, 1): h.group(2),
        (1, 2): h.group(3),
        (2, 3): h.group(5),   # all of H^5 sits in coniveau 2
        (5, 5): Z,
    }
    for p in (2, 3, 4):
        e = chow.entry(p)
        if e is not None and e.mod_alg is not None:
            entries[(p, p)] = e.mod_alg
        else:
            entries[(p, p)] = UnknownEntry(
                f"codim-{p} cycles mod algebraic equivalence not recorded")
    e5 = chow.entry(5)
    if e5 is not None and e5.mod_alg is not None:
        entries[(5, 5)] = e5.mod_alg
    return BigradedPage(entries, 5)


def build_bloch_ogus_page(v: VarietyData) -> BigradedPage:
    """The integral cycle-theoretic table of the variety.

    Supported dimensions are 2 through 5.  Above dimension 2 the table shape
    is the rationally connected one; missing flags or Chow data produce
    undetermined entries, never unjustified zeros.
    """
    if v.dim == 2:
        return _surface_page(v)
    if v.dim == 3:
        return _threefold_page(v)
    if v.dim == 4:
        return _fourfold_page(v)
    if v.dim == 5:
        return _fivefold_page(v)
    raise ValueError(f"no table for dimension {v.dim}")


# ---------------------------------------------------------------------------
# mod-m pages


def _ktau_entry(sub_e: PageEntry, next_e: PageEntry,
                m: Optional[int]) -> PageEntry:
    if isinstance(sub_e, GroupUpToExtension):
        sub_e = sub_e.resolved if sub_e.resolved is not None else \
            UnknownEntry("unresolved extension")
    if isinstance(next_e, GroupUpToExtension):
        next_e = next_e.resolved if next_e.resolved is not None else \
            UnknownEntry("unresolved extension")
    if isinstance(next_e, UnknownEntry) and next_e.has_torsion is False:
        next_e = ZERO  # only its torsion feeds this entry
    if isinstance(sub_e, FgAbGroup) and isinstance(next_e, FgAbGroup):
        if m is None:
            return SymbolicUct(sub_e, next_e)
        return sheaf_uct(sub_e, next_e, m)
    # at least one side is unknown; salvage certified nonzero-ness
    nonzero = None
    reasons = []
    if isinstance(sub_e, FgAbGroup):
        if not sub_e.is_zero:
            nonzero = True
    else:
        reasons.append(sub_e.note)
        if sub_e.known_nonzero:
            nonzero = True
    if isinstance(next_e, FgAbGroup):
        pass
    else:
        reasons.append(next_e.note)
        if next_e.has_torsion:
            nonzero = True
    return UnknownEntry("; ".join(r for r in reasons if r),
                        known_nonzero=nonzero)


def ktau_e2(page: BigradedPage, m: Optional[int] = None) -> BigradedPage:
    """The mod-m page obtained from the integral one by the coefficient
    sequence in each weight: entry (p, -q) is the middle of

        0 -> E(p,q)/m -> E(p,-q; Z/m) -> E(p+1,q)[m] -> 0.

    With m = None the page stays symbolic in the modulus.
    """
    if page.orientation != "bloch-ogus":
        raise ValueError("expected the integral page")
    if m is not None and m < 2:
        raise ValueError("coefficient modulus must be >= 2")
    entries: dict[tuple[int, int], PageEntry] = {}
    for q in range(0, page.dim + 1):
        for p in range(0, q + 1):
            e = _ktau_entry(page.entry(p, q), page.entry(p + 1, q), m)
            if isinstance(e, FgAbGroup) and e.is_zero:
                continue
            entries[(p, -q)] = e
    return BigradedPage(entries, page.dim,
                        coeff="Z/m" if m is None else f"Z/{m}",
                        orientation="ktau", notes=page.notes)


def _is_zero_entry(entry: PageEntry) -> bool:
    return entry_state(entry).is_zero


def _survives(page: BigradedPage, p: int, j: int) -> bool:
    # every differential in or out has certified-zero partner entries
    for r in range(2, page.dim + 3):
        if not _is_zero_entry(page.entry(p - r, j - r + 1)):
            return False
        if not _is_zero_entry(page.entry(p + r, j + r - 1)):
            return False
    return True


def ktau_top(page: BigradedPage, d: int) -> TriState:
    """Vanishing of the top-degree group: decided by the entry (0, -d)."""
    if page.orientation != "ktau":
        raise ValueError("expected a mod-m page")
    return entry_state(page.entry(0, -d))


def ktau_next(page: BigradedPage, d: int) -> TriState:
    """Vanishing in degree d-1, bounded by the four-term exact sequence

      0 -> E(1,-d) -> (K/tau)_{d-1} -> E(0,-(d-1)) -> E(2,-d).

    A nonzero first entry forces nonzero; with the first entry zero the
    middle is pinched between the third and the obstruction, so it vanishes
    iff the third does whenever the obstruction is zero.
    """
    if page.orientation != "ktau":
        raise ValueError("expected a mod-m page")
    a = entry_state(page.entry(1, -d))
    b = entry_state(page.entry(0, -(d - 1)))
    obstruction = entry_state(page.entry(2, -d))
    if a.is_nonzero:
        return a
    if a.is_undetermined:
        return TriState.undetermined(
            "entry (1,-%d) not determined: %s" % (d, a.reason))
    if b.is_zero:
        return TriState.zero()
    if b.is_undetermined:
        return TriState.undetermined(
            "entry (0,-%d) not determined: %s" % (d - 1, b.reason))
    if obstruction.is_zero:
        return b
    return TriState.undetermined(
        "bounded between 0 and %s; the obstruction entry (2,-%d) is not "
        "known to vanish" % (b.witness, d))


class KtauProfile:
    """Per-degree vanishing states of the mod-m groups, read off the page
    by support analysis of the differentials."""

    __slots__ = ("dim", "coeff", "_states", "_details")

    def __init__(self, dim: int, coeff: str, states: Mapping[int, TriState],
                 details: Mapping[int, str]):
        self.dim = dim
        self.coeff = coeff
        self._states = dict(states)
        self._details = dict(details)

    def state(self, n: int) -> TriState:
        if n < 0 or n > self.dim:
            return TriState.zero()
        return self._states[n]

    def upper_bound(self) -> int:
        """Smallest d such that every degree above d is certified zero."""
        bad = [n for n, s in self._states.items() if not s.is_zero]
        return max(bad) if bad else 0

    def lower_bound(self) -> int:
        nz = [n for n, s in self._states.items() if s.is_nonzero]
        return max(nz) if nz else 0

    def detail(self, n: int) -> str:
        return self._details.get(n, "")

    def render(self) -> str:
        symbolic = self.coeff == "Z/m"
        lines = []
        for n in range(self.dim, -1, -1):
            s = self.state(n)
            if s.is_zero:
                text = "0 for all m" if symbolic else "0"
            elif s.is_nonzero:
                text = ("nonzero for some m: " if symbolic else "nonzero: ") \
                    + self.detail(n)
            else:
                text = "undetermined: " + self.detail(n)
            lines.append(f"(K/tau)_{n}: {text}")
        return "\n".join(lines)


def ktau_profile(page: BigradedPage) -> KtauProfile:
    """Survey each total degree n: zero when the whole diagonal is zero,
    nonzero when some nonzero entry has all differentials blocked by zero
    partners, undetermined otherwise."""
    if page.orientation != "ktau":
        raise ValueError("expected a mod-m page")
    states: dict[int, TriState] = {}
    details: dict[int, str] = {}
    for n in range(0, page.dim + 1):
        positions = [(p, -(p + n)) for p in range(0, page.dim - n + 1)]
        cells = [(pos, page.entry(*pos)) for pos in positions]
        cells = [(pos, e) for pos, e in cells if not _is_zero_entry(e)]
        if not cells:
            states[n] = TriState.zero()
            continue
        survivor = None
        for pos, e in cells:
            if entry_state(e).is_nonzero and _survives(page, *pos):
                survivor = (pos, e)
                break
        if survivor is not None:
            (p, j), e = survivor
            states[n] = TriState.nonzero(e)
            details[n] = f"{e} at ({p},{j}) survives to the last page"
        else:
            states[n] = TriState.undetermined("entries not settled")
            details[n] = "; ".join(
                f"({p},{j}): {e}" for (p, j), e in cells)
    return KtauProfile(page.dim, page.coeff, states, details)


# ---------------------------------------------------------------------------
# topological K-theory via Atiyah-Hirzebruch folding


def _fold(h: GradedAb, degrees: list[int]) -> tuple[FgAbGroup, bool]:
    acc = ZERO
    ambiguous = False
    for i in sorted(degrees, reverse=True):
        g = h.group(i)
        if g.is_zero:
            continue
        step = middle_of_short_exact(acc, g, SplitPolicy.assume_split())
        ambiguous = ambiguous or step.ambiguity_flag
        acc = step.candidate
    return acc, ambiguous


def _apply_policy(candidate: FgAbGroup, ambiguous: bool,
                  policy: SplitPolicy) -> GroupUpToExtension:
    if not ambiguous:
        return GroupUpToExtension(candidate, ZERO, candidate, False)
    if policy.mode == "assume_split":
        return GroupUpToExtension(candidate, ZERO, candidate, True)
    if policy.mode == "refuse":
        return GroupUpToExtension(candidate, ZERO, None, True)
    named = policy.value
    if named.rank != candidate.rank or \
            named.torsion_order != candidate.torsion_order:
        raise ValueError(
            f"override {named} does not match the filtration candidate "
            f"{candidate}")
    return GroupUpToExtension(named, ZERO, named, False)


def ahss_ku(h: GradedAb,
            policy: SplitPolicy = SplitPolicy.refuse()
            ) -> tuple[GroupUpToExtension, GroupUpToExtension]:
    """Fold the cohomology of a variety into (KU^even, KU^odd).

    Degeneration of the spectral sequence at its second page is an input
    assumption, not something this function checks.  The filtration is
    assembled from the top degree down; only genuinely ambiguous extension
    steps consult the policy.
    """
    top = h.top_degree if h.support else 0
    even, even_amb = _fold(h, list(range(0, top + 1, 2)))
    odd, odd_amb = _fold(h, list(range(1, top + 1, 2)))
    return (_apply_policy(even, even_amb, policy),
            _apply_policy(odd, odd_amb, policy))


def _as_group(value: Union[FgAbGroup, GroupUpToExtension]) -> FgAbGroup:
    if isinstance(value, GroupUpToExtension):
        if value.resolved is None:
            raise ValueError("unresolved extension; resolve it first")
        return value.resolved
    return value


def ku_mod_m(even: Union[FgAbGroup, GroupUpToExtension],
             odd: Union[FgAbGroup, GroupUpToExtension],
             m: int) -> tuple[FgAbGroup, FgAbGroup]:
    """Mod-m topological K-theory from the integral pair:

        KU^0(X; Z/m) = KU^even/m + m-tors(KU^odd),  and symmetrically.

    Both outputs are honest groups: the coefficient sequence for KU splits.
    """
    if m < 2:
        raise ValueError("coefficient modulus must be >= 2")
    e = _as_group(even)
    o = _as_group(odd)
    return (e.tensor_zmod(m) + o.m_torsion(m),
            o.tensor_zmod(m) + e.m_torsion(m))


# ---------------------------------------------------------------------------
# Gysin sequence of an etale P^1-bundle


def _check_window(sub: FgAbGroup, quot: FgAbGroup, total: FgAbGroup,
                  degree: int) -> None:
    if total.rank != sub.rank + quot.rank:
        raise GysinError(
            f"window at degree {degree}: rank {total.rank} cannot arise "
            f"from sub {sub} and quotient {quot}")
    if not torsion_embeds(sub, total):
        raise GysinError(
            f"window at degree {degree}: torsion of {sub} does not embed "
            f"in {total}")
    if (sub.torsion_order * quot.torsion_order) % total.torsion_order:
        raise GysinError(
            f"window at degree {degree}: torsion order of {total} does not "
            f"divide that of {sub} + {quot}")


def gysin_p1(hx: GradedAb, cup: Mapping[int, IntMatrix]) -> GradedAb:
    """Integral cohomology of the etale P^1-bundle attached to an index-2
    Brauer class, from the base and cup product with the class's integral
    obstruction in degree 3.

    `cup[i]` presents the map H^i -> H^{i+3} in canonical generators;
    missing degrees are zero maps.  Each degree i of the bundle sits in

        0 -> coker(H^{i-3} -> H^i) -> H^i(P) -> ker(H^{i-2} -> H^{i+1}) -> 0.

    Forced extensions are taken as-is; an ambiguous window is resolved
    against its dual partner in degree (M+1-i), whose torsion it must match
    (M = top degree of the bundle).  Mutually ambiguous partner windows fall
    back to the split candidate, which is correct for the trivial class.
    Inconsistent constraints raise GysinError.
    """
    if not hx.support:
        return GradedAb({})
    top = hx.top_degree
    for key in cup:
        if not 0 <= key <= top:
            raise ValueError(f"cup map at degree {key} outside 0..{top}")
    m_top = top + 2

    def hom(i: int) -> GroupHom:
        dom, cod = hx.group(i), hx.group(i + 3)
        if i in cup:
            return GroupHom(dom, cod, cup[i])
        return GroupHom.zero(dom, cod)

    windows = {}
    resolved: dict[int, FgAbGroup] = {}
    for i in range(0, m_top + 1):
        sub = hom(i - 3).cokernel()
        quot = hom(i - 2).kernel()
        mid = middle_of_short_exact(sub, quot, SplitPolicy.refuse())
        windows[i] = (sub, quot, mid)
        if mid.resolved is not None:
            resolved[i] = mid.resolved

    for i in range(0, m_top + 1):
        partner = m_top + 1 - i
        if i in resolved or i > partner:
            continue
        sub, quot, _ = windows[i]
        if partner in resolved or partner > m_top:
            partner_torsion = resolved[partner].torsion_part() \
                if partner <= m_top else ZERO
            candidate = FgAbGroup(sub.rank + quot.rank,
                                  partner_torsion.divisors)
            _check_window(sub, quot, candidate, i)
            resolved[i] = candidate
        else:
            split_i = sub + quot
            p_sub, p_quot, _ = windows[partner]
            split_p = p_sub + p_quot
            if split_i.torsion_part() != split_p.torsion_part():
                raise GysinError(
                    f"windows at degrees {i} and {partner} are both "
                    f"ambiguous and their split candidates break duality")
            resolved[i] = split_i
            resolved[partner] = split_p

    # an ambiguous window whose partner was resolved later in the sweep
    for i in range(0, m_top + 1):
        if i not in resolved:
            partner = m_top + 1 - i
            sub, quot, _ = windows[i]
            partner_torsion = resolved[partner].torsion_part() \
                if partner <= m_top else ZERO
            candidate = FgAbGroup(sub.rank + quot.rank,
                                  partner_torsion.divisors)
            _check_window(sub, quot, candidate, i)
            resolved[i] = candidate

    return GradedAb(resolved)
