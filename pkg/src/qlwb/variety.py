"""Input data for a smooth complex projective variety (or a catalog entry
standing for one): integral cohomology, Hodge numbers, cycle-theoretic flags,
semiorthogonal decompositions, Chow data, and Brauer twists.

Everything here is a passive record; computation lives in `pages`,
`decision`, and `ktheory`.  Flags are tri-valued (True / False / None =
unknown): an unknown flag must never produce a bound or a table entry, only
an explicitly undetermined one.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional

from .groups import FgAbGroup, GradedAb

__all__ = [
    "ChowData",
    "ChowEntry",
    "ComponentRef",
    "Flags",
    "Twist",
    "VarietyData",
]


@dataclass(frozen=True)
class Flags:
    rationally_connected: Optional[bool] = None
    ch0_trivial: Optional[bool] = None
    alg_eq_hom_ch1: Optional[bool] = None
    n2h5_full: Optional[bool] = None
    ihc_h4: Optional[bool] = None
    ihc_h6: Optional[bool] = None
    rational: Optional[bool] = None
    stably_rational: Optional[bool] = None
    unirational_degree: Optional[int] = None
    conic_bundle_base_dim: Optional[int] = None
    k0_to_ku0_surjective: Optional[bool] = None

    @property
    def ch0_known_trivial(self) -> Optional[bool]:
        # rational connectedness forces CH_0 = Z
        if self.ch0_trivial is not None:
            return self.ch0_trivial
        if self.rationally_connected:
            return True
        return None


@dataclass(frozen=True)
class ComponentRef:
    """One factor of a semiorthogonal decomposition."""

    kind: str  # exceptional | curve | variety | twisted_variety | phantom | opaque
    genus: Optional[int] = None
    name: Optional[str] = None
    brauer_class_id: Optional[str] = None
    interval: Optional[tuple[int, int]] = None

    _KINDS = ("exceptional", "curve", "variety", "twisted_variety",
              "phantom", "opaque")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise ValueError(f"unknown component kind {self.kind!r}")
        if self.kind == "curve" and (self.genus is None or self.genus < 0):
            raise ValueError("curve component needs a genus >= 0")
        if self.kind in ("variety", "twisted_variety") and not self.name:
            raise ValueError(f"{self.kind} component needs a name")
        if self.kind == "twisted_variety" and not self.brauer_class_id:
            raise ValueError("twisted_variety component needs a Brauer class id")
        if self.kind == "opaque":
            if self.interval is None or self.interval[0] > self.interval[1]:
                raise ValueError("opaque component needs an interval lo <= hi")

    @classmethod
    def exceptional(cls) -> "ComponentRef":
        return cls("exceptional")

    @classmethod
    def curve(cls, genus: int) -> "ComponentRef":
        return cls("curve", genus=genus)

    @classmethod
    def variety(cls, name: str) -> "ComponentRef":
        return cls("variety", name=name)

    @classmethod
    def twisted_variety(cls, name: str, brauer_class_id: str) -> "ComponentRef":
        return cls("twisted_variety", name=name, brauer_class_id=brauer_class_id)

    @classmethod
    def phantom(cls) -> "ComponentRef":
        return cls("phantom")

    @classmethod
    def opaque(cls, lo: int, hi: int) -> "ComponentRef":
        return cls("opaque", interval=(lo, hi))

    def __str__(self) -> str:
        if self.kind == "curve":
            return f"curve(g={self.genus})"
        if self.kind == "variety":
            return f"variety({self.name})"
        if self.kind == "twisted_variety":
            return f"twisted({self.name}, {self.brauer_class_id})"
        if self.kind == "opaque":
            return f"opaque[{self.interval[0]},{self.interval[1]}]"
        return self.kind


@dataclass(frozen=True)
class Twist:
    """A Brauer class on the variety, with enough data to run the Gysin
    sequence of the associated etale P^1-bundle when the index is 2.

    `cup` records cup product with the integral Bockstein of the class as a
    matrix per degree i (a map H^i -> H^{i+3} in canonical generators);
    missing degrees are zero maps.
    """

    brauer_class_id: str
    index: int
    cup: Mapping[int, list] = field(default_factory=dict)

    def __post_init__(self):
        if self.index < 1:
            raise ValueError("Brauer class index must be >= 1")


@dataclass(frozen=True)
class ChowEntry:
    """What is known about CH^i of the variety.

    The group itself is reported as free part + finite torsion + named
    uniquely divisible summands (e.g. an intermediate Jacobian), since those
    admit no finite description.  `mod_alg` is CH^i modulo algebraic
    equivalence when known; `certificate` names the argument that the
    codimension filtration on K_0 splits against this entry's torsion (needed
    when (i-1)! > 1 meets torsion).
    """

    free_rank: int = 0
    torsion: FgAbGroup = field(default_factory=FgAbGroup)
    divisible: tuple[str, ...] = ()
    divisible_torsion_free: Optional[bool] = None
    mod_alg: Optional[FgAbGroup] = None
    certificate: Optional[str] = None


@dataclass(frozen=True)
class ChowData:
    entries: Mapping[int, ChowEntry]

    def entry(self, codim: int) -> Optional[ChowEntry]:
        return self.entries.get(codim)


@dataclass(frozen=True)
class VarietyData:
    name: str
    dim: int
    h_int: GradedAb
    hodge: Mapping[tuple[int, int], int] = field(default_factory=dict)
    ns_rank: Optional[int] = None
    hdg4_rank: Optional[int] = None  # rank of the integral (2,2) Hodge lattice
    flags: Flags = field(default_factory=Flags)
    sod: Optional[tuple[ComponentRef, ...]] = None
    chow: Optional[ChowData] = None
    twists: tuple[Twist, ...] = ()

    def betti(self, i: int) -> int:
        return self.h_int.group(i).rank

    def torsion(self, i: int) -> FgAbGroup:
        return self.h_int.group(i).torsion_part()

    def h(self, p: int, q: int) -> Optional[int]:
        return self.hodge.get((p, q))

    def twist(self, brauer_class_id: str) -> Twist:
        for t in self.twists:
            if t.brauer_class_id == brauer_class_id:
                return t
        raise KeyError(f"{self.name} has no Brauer class {brauer_class_id!r}")

    # -- invariant checking -------------------------------------------------

    def violations(self) -> list[str]:
        """All detectable inconsistencies in the stored data.

        Poincare duality and the universal-coefficient pairing constrain the
        Betti numbers and torsion; Hodge symmetry and row sums constrain the
        diamond; rational connectedness kills h^{0,i} and b_1.
        """
        out = []
        d = self.dim
        if d < 1:
            out.append("dim must be >= 1")
            return out
        for i in self.h_int.support:
            if not 0 <= i <= 2 * d:
                out.append(f"H^{i} outside degrees 0..{2 * d}")
        for i in range(0, 2 * d + 1):
            if self.betti(i) != self.betti(2 * d - i):
                out.append(
                    f"Poincare duality fails: b_{i} = {self.betti(i)} but "
                    f"b_{2 * d - i} = {self.betti(2 * d - i)}")
                break
        for i in range(0, 2 * d):
            if self.torsion(i + 1) != self.torsion(2 * d - i):
                out.append(
                    f"torsion pairing fails: tors H^{i + 1} = "
                    f"{self.torsion(i + 1)} but tors H^{2 * d - i} = "
                    f"{self.torsion(2 * d - i)}")
                break
        for (p, q), v in self.hodge.items():
            if v < 0:
                out.append(f"h^{p},{q} negative")
            sym = self.hodge.get((q, p))
            if sym is not None and sym != v:
                out.append(f"Hodge symmetry fails at ({p},{q})")
        for i in range(0, 2 * d + 1):
            row = [self.hodge.get((p, i - p))
                   for p in range(max(0, i - d), min(i, d) + 1)]
            if all(v is not None for v in row) and sum(row) != self.betti(i):
                out.append(
                    f"Hodge row {i} sums to {sum(row)} but b_{i} = "
                    f"{self.betti(i)}")
        if self.flags.rationally_connected:
            for i in range(1, d + 1):
                v = self.hodge.get((0, i))
                if v:
                    out.append(f"rationally connected but h^(0,{i}) = {v}")
            if self.betti(1):
                out.append("rationally connected but b_1 != 0")
        if self.ns_rank is not None:
            h11 = self.hodge.get((1, 1))
            if h11 is not None and self.ns_rank > h11:
                out.append(f"ns_rank {self.ns_rank} exceeds h^(1,1) = {h11}")
        return out

    def validate(self) -> None:
        problems = self.violations()
        if problems:
            raise ValueError(f"{self.name}: " + "; ".join(problems))
