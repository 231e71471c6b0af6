"""Exact arithmetic with finitely generated abelian groups.

Everything downstream (spectral-sequence pages, K-theory bookkeeping, the
variety catalog) works with groups of the form

    Z^r  +  Z/d_1 + ... + Z/d_k,        d_1 | d_2 | ... | d_k,  d_i >= 2,

kept eagerly in this canonical form so that equality is literal equality of
invariants.  Integer matrices are plain lists of rows; the Smith normal form
here returns the unimodular transforms, which the homomorphism machinery
(`GroupHom`) needs for kernel and cokernel lattice computations.

>>> FgAbGroup(0, [4, 6])
FgAbGroup(0, (2, 12))
>>> str(FgAbGroup(12, [2]))
'Z^12 + Z/2'
>>> cokernel([[2, 0], [0, 3]])
FgAbGroup(0, (6,))
"""
from __future__ import annotations

from itertools import groupby
from math import gcd, prod
import re
from typing import Iterable, Iterator, Mapping

IntMatrix = list  # list of rows, each a list of ints; kept as a plain type

__all__ = [
    "FgAbGroup",
    "GradedAb",
    "GroupHom",
    "IntMatrix",
    "Z",
    "ZERO",
    "Zmod",
    "cokernel",
    "identity_matrix",
    "matmul",
    "smith_normal_form",
    "subtract_summand",
    "torsion_embeds",
]


# ---------------------------------------------------------------------------
# integer matrices


def identity_matrix(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    ra, ca = len(a), len(a[0]) if a else 0
    rb, cb = len(b), len(b[0]) if b else 0
    if ca != rb:
        raise ValueError(f"cannot multiply {ra}x{ca} by {rb}x{cb}")
    return [[sum(a[i][k] * b[k][j] for k in range(ca)) for j in range(cb)]
            for i in range(ra)]


def _shape(matrix: IntMatrix) -> tuple[int, int]:
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    for row in matrix:
        if len(row) != cols:
            raise ValueError("ragged matrix")
    return rows, cols


def smith_normal_form(matrix: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return (D, U, V) with U*matrix*V = D in Smith normal form.

    D is diagonal with nonnegative entries satisfying d_1 | d_2 | ...; U and V
    are unimodular.  The input is not modified.

    >>> d, u, v = smith_normal_form([[2, 4], [6, 8]])
    >>> [d[0][0], d[1][1]]
    [2, 4]
    """
    nr, nc = _shape(matrix)
    a = [[int(x) for x in row] for row in matrix]
    u = identity_matrix(nr)
    v = identity_matrix(nc)

    def add_row(src, dst, q):  # row[dst] += q * row[src]
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, q):
        for row in a:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    def swap_rows(i, j):
        if i != j:
            a[i], a[j] = a[j], a[i]
            u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        if i != j:
            for row in a:
                row[i], row[j] = row[j], row[i]
            for row in v:
                row[i], row[j] = row[j], row[i]

    t = 0
    while t < min(nr, nc):
        # pivot: the nonzero entry of least magnitude in the working block
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (best is None
                                or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])

        # Clear column t, then row t.  A failed exact division leaves a
        # remainder smaller than the pivot, so restarting strictly shrinks
        # the minimum magnitude and the loop terminates.
        restart = False
        for i in range(t + 1, nr):
            if a[i][t]:
                add_row(t, i, -(a[i][t] // a[t][t]))
                if a[i][t]:
                    restart = True
        if restart:
            continue
        for j in range(t + 1, nc):
            if a[t][j]:
                add_col(t, j, -(a[t][j] // a[t][t]))
                if a[t][j]:
                    restart = True
        if restart:
            continue

        # divisibility: fold any offending row into row t and try again
        off = None
        for i in range(t + 1, nr):
            if any(a[i][j] % a[t][t] for j in range(t + 1, nc)):
                off = i
                break
        if off is not None:
            add_row(off, t, 1)
            continue

        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1

    return a, u, v


def cokernel(matrix: IntMatrix) -> "FgAbGroup":
    """Cokernel of the map Z^cols -> Z^rows whose columns span the image.

    >>> cokernel([[1, 0, 0], [0, 1, 0], [0, 0, 6], [0, 0, 0]])
    FgAbGroup(1, (6,))
    """
    rows, cols = _shape(matrix)
    if cols == 0:
        return FgAbGroup(rows)
    d, _, _ = smith_normal_form(matrix)
    nz = [d[i][i] for i in range(min(rows, cols)) if d[i][i]]
    return FgAbGroup(rows - len(nz), nz)


def _solve_columns(basis: IntMatrix, rhs: IntMatrix) -> IntMatrix:
    """Solve basis * C = rhs over Z, where the columns of `basis` are
    linearly independent.  Raises if no integer solution exists."""
    n, s = _shape(basis)
    _, k = _shape(rhs) if rhs else (0, 0)
    if s == 0:
        if any(x for row in rhs for x in row):
            raise ValueError("no integer solution")
        return []
    d, u, v = smith_normal_form(basis)
    w = matmul(u, rhs)
    cp = [[0] * k for _ in range(s)]
    for i in range(n):
        for j in range(k):
            if i < s and d[i][i]:
                q, r = divmod(w[i][j], d[i][i])
                if r:
                    raise ValueError("no integer solution")
                cp[i][j] = q
            elif w[i][j]:
                raise ValueError("no integer solution")
    return matmul(v, cp)


# ---------------------------------------------------------------------------
# canonical form


def _chainify(ds: list[int]) -> tuple[int, ...]:
    # Replace pairs (a, b) by (gcd, lcm) until every element divides the
    # next.  Each replacement strictly decreases some element, so this
    # terminates; the multiset of prime powers is preserved throughout.
    ds = [d for d in ds if d != 1]
    changed = True
    while changed:
        changed = False
        ds.sort()
        for i in range(len(ds)):
            for j in range(i + 1, len(ds)):
                if ds[j] % ds[i]:
                    g = gcd(ds[i], ds[j])
                    ds[i], ds[j] = g, ds[i] * ds[j] // g
                    changed = True
        if changed:
            ds = [d for d in ds if d != 1]
    return tuple(ds)


_TERM_RE = re.compile(
    r"^(?:Z(?:\^(\d+))?|Z/(\d+)|\(Z/(\d+)\)\^(\d+))$")


class FgAbGroup:
    """A finitely generated abelian group in canonical form.

    Construction accepts any list of cyclic orders and normalizes it: order 0
    counts as a free summand, order 1 is dropped, and the rest are merged
    into the elementary divisor chain.

    >>> FgAbGroup(0, [2, 3])
    FgAbGroup(0, (6,))
    >>> FgAbGroup(1, [4, 6]).divisors
    (2, 12)
    """

    __slots__ = ("_rank", "_divisors")

    def __init__(self, free_rank: int = 0, torsion: Iterable[int] = ()):
        rank = int(free_rank)
        if rank < 0:
            raise ValueError("negative rank")
        ds = []
        for d in torsion:
            d = int(d)
            if d < 0:
                raise ValueError("negative torsion order")
            if d == 0:
                rank += 1
            elif d > 1:
                ds.append(d)
        self._rank = rank
        self._divisors = _chainify(ds)

    # -- constructors

    @classmethod
    def free(cls, n: int) -> "FgAbGroup":
        return cls(n)

    @classmethod
    def cyclic(cls, d: int) -> "FgAbGroup":
        return cls(0, (d,))

    @classmethod
    def parse(cls, text: str) -> "FgAbGroup":
        """Inverse of ``str``; also accepts expanded forms like ``Z + Z``.

        >>> FgAbGroup.parse("Z^10 + Z/2")
        FgAbGroup(10, (2,))
        """
        s = text.strip()
        if s == "0":
            return cls()
        rank = 0
        torsion: list[int] = []
        if not s:
            raise ValueError("empty group expression")
        for term in s.split("+"):
            m = _TERM_RE.match(term.strip())
            if not m:
                raise ValueError(f"bad group term {term.strip()!r} in {text!r}")
            power, single, based, exp = m.groups()
            if single is not None:
                torsion.append(int(single))
            elif based is not None:
                torsion.extend([int(based)] * int(exp))
            else:
                rank += int(power) if power else 1
        return cls(rank, torsion)

    # -- invariants

    @property
    def rank(self) -> int:
        return self._rank

    @property
    def divisors(self) -> tuple[int, ...]:
        return self._divisors

    @property
    def torsion_order(self) -> int:
        return prod(self._divisors)

    @property
    def exponent(self) -> int:
        return self._divisors[-1] if self._divisors else 1

    @property
    def is_zero(self) -> bool:
        return not self._rank and not self._divisors

    @property
    def is_torsion_free(self) -> bool:
        return not self._divisors

    @property
    def is_finite(self) -> bool:
        return not self._rank

    @property
    def ngens(self) -> int:
        # canonical generators: free ones first, then one per divisor
        return self._rank + len(self._divisors)

    # -- arithmetic

    def direct_sum(self, other: "FgAbGroup") -> "FgAbGroup":
        return FgAbGroup(self._rank + other._rank,
                         self._divisors + other._divisors)

    __add__ = direct_sum

    def __mul__(self, n: int) -> "FgAbGroup":
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        return FgAbGroup(self._rank * n, self._divisors * n)

    __rmul__ = __mul__

    def free_part(self) -> "FgAbGroup":
        return FgAbGroup(self._rank)

    def torsion_part(self) -> "FgAbGroup":
        return FgAbGroup(0, self._divisors)

    def tensor_zmod(self, m: int) -> "FgAbGroup":
        """G (x) Z/m:  (Z/m)^rank + sum Z/gcd(d_i, m).

        >>> FgAbGroup(2, [4]).tensor_zmod(2)
        FgAbGroup(0, (2, 2, 2))
        """
        if m < 1:
            raise ValueError("modulus must be >= 1")
        return FgAbGroup(0, [m] * self._rank +
                         [gcd(d, m) for d in self._divisors])

    def m_torsion(self, m: int) -> "FgAbGroup":
        """The m-torsion subgroup G[m] = sum Z/gcd(d_i, m)."""
        if m < 1:
            raise ValueError("modulus must be >= 1")
        return FgAbGroup(0, [gcd(d, m) for d in self._divisors])

    # -- plumbing

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FgAbGroup):
            return NotImplemented
        return (self._rank, self._divisors) == (other._rank, other._divisors)

    def __hash__(self) -> int:
        return hash((self._rank, self._divisors))

    def __repr__(self) -> str:
        return f"FgAbGroup({self._rank}, {self._divisors})"

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        if self._rank == 1:
            parts.append("Z")
        elif self._rank:
            parts.append(f"Z^{self._rank}")
        for d, grp in groupby(self._divisors):
            k = len(list(grp))
            parts.append(f"Z/{d}" if k == 1 else f"(Z/{d})^{k}")
        return " + ".join(parts)


ZERO = FgAbGroup()
Z = FgAbGroup(1)


def Zmod(d: int) -> FgAbGroup:
    """The cyclic group Z/d."""
    return FgAbGroup.cyclic(d)


def torsion_embeds(a: FgAbGroup, b: FgAbGroup) -> bool:
    """Whether the torsion part of `a` embeds in the torsion part of `b`.

    For finite abelian groups this holds iff, aligning divisor chains from
    the largest divisor down, each divisor of `a` divides its counterpart.
    """
    da = a.divisors[::-1]
    db = b.divisors[::-1]
    if len(da) > len(db):
        return False
    return all(db[i] % da[i] == 0 for i in range(len(da)))


def _prime_power_parts(n: int) -> list[int]:
    """The prime-power factors of n, by trial division.

    Orders that reach this code are cohomological torsion orders, hence tiny;
    no clever factoring is warranted.

    >>> _prime_power_parts(12)
    [4, 3]
    """
    parts = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                q *= p
                n //= p
            parts.append(q)
        p += 1 if p == 2 else 2
    if n > 1:
        parts.append(n)
    return parts


def subtract_summand(big: FgAbGroup, small: FgAbGroup) -> FgAbGroup:
    """The complement C with big = small + C, if one exists.

    By Krull-Schmidt for finitely generated abelian groups the complement is
    unique when it exists; it exists iff the primary decomposition of `small`
    is a sub-multiset of that of `big`.

    >>> str(subtract_summand(FgAbGroup.parse("Z^24 + Z/2"),
    ...                      FgAbGroup.parse("Z^12 + Z/2")))
    'Z^12'
    >>> subtract_summand(Zmod(4), Zmod(2))
    Traceback (most recent call last):
        ...
    ValueError: Z/2 is not a direct summand of Z/4
    """
    if big.rank < small.rank:
        raise ValueError(f"{small} is not a direct summand of {big}")
    counts: dict[int, int] = {}
    for d in big.divisors:
        for q in _prime_power_parts(d):
            counts[q] = counts.get(q, 0) + 1
    for d in small.divisors:
        for q in _prime_power_parts(d):
            if not counts.get(q):
                raise ValueError(f"{small} is not a direct summand of {big}")
            counts[q] -= 1
    leftover = [q for q, c in counts.items() for _ in range(c)]
    return FgAbGroup(big.rank - small.rank, leftover)


# ---------------------------------------------------------------------------
# homomorphisms


class GroupHom:
    """A homomorphism between groups in canonical form.

    The matrix has one column per generator of the domain and one row per
    generator of the codomain, with free generators listed before torsion
    generators (torsion in divisor-chain order).  Column j records the image
    of the j-th domain generator.  The constructor checks well-definedness:
    a generator of order d must map to an element killed by d.

    >>> GroupHom(Z, Zmod(2), [[1]]).kernel()
    FgAbGroup(1, ())
    """

    __slots__ = ("dom", "cod", "matrix")

    def __init__(self, dom: FgAbGroup, cod: FgAbGroup, matrix: IntMatrix):
        rows, cols = _shape(matrix)
        if rows != cod.ngens or (rows and cols != dom.ngens):
            raise ValueError(
                f"matrix is {rows}x{cols}, expected {cod.ngens}x{dom.ngens}")
        for j, d in enumerate(dom.divisors):
            col = dom.rank + j
            for i in range(cod.rank):
                if matrix[i][col]:
                    raise ValueError(
                        f"generator of order {d} cannot map to a free generator")
            for i, dh in enumerate(cod.divisors):
                if (matrix[cod.rank + i][col] * d) % dh:
                    raise ValueError(
                        f"generator of order {d} maps to an element "
                        f"not killed by {d}")
        self.dom = dom
        self.cod = cod
        self.matrix = [[int(x) for x in row] for row in matrix]

    @classmethod
    def zero(cls, dom: FgAbGroup, cod: FgAbGroup) -> "GroupHom":
        return cls(dom, cod, [[0] * dom.ngens for _ in range(cod.ngens)])

    def _augmented(self) -> IntMatrix:
        # map matrix with the codomain relation lattice appended as columns
        aug = [row[:] for row in self.matrix]
        for j, d in enumerate(self.cod.divisors):
            target = self.cod.rank + j
            for i, row in enumerate(aug):
                row.append(d if i == target else 0)
        return aug

    def kernel(self) -> FgAbGroup:
        ng = self.dom.ngens
        if ng == 0:
            return ZERO
        aug = self._augmented()
        if not aug:  # zero codomain: the kernel is everything
            lattice = identity_matrix(ng)
        else:
            d, _, v = smith_normal_form(aug)
            nr, nc = _shape(aug)
            r = sum(1 for i in range(min(nr, nc)) if d[i][i])
            # columns of v past the rank span the integer kernel of aug;
            # their first `ng` coordinates span the kernel lattice in Z^ng
            lattice = [[v[i][j] for j in range(r, nc)] for i in range(ng)]
        # reduce the spanning set to a basis: the nonzero columns after
        # column reduction are linearly independent and span the same lattice
        bv = matmul(lattice, smith_normal_form(lattice)[2])
        ncols = len(bv[0]) if bv else 0
        keep = [j for j in range(ncols) if any(bv[i][j] for i in range(ng))]
        if not keep:
            return ZERO
        basis = [[row[j] for j in keep] for row in bv]
        relations = [[0] * len(self.dom.divisors) for _ in range(ng)]
        for j, d0 in enumerate(self.dom.divisors):
            relations[self.dom.rank + j][j] = d0
        # the domain relation lattice sits inside the kernel lattice, and the
        # kernel group is their quotient
        return cokernel(_solve_columns(basis, relations))

    def cokernel(self) -> FgAbGroup:
        if self.cod.ngens == 0:
            return ZERO
        return cokernel(self._augmented())


# ---------------------------------------------------------------------------
# graded groups


class GradedAb:
    """A finitely supported collection of groups indexed by integer degree."""

    __slots__ = ("_items", "_map")

    def __init__(self, groups: Mapping[int, FgAbGroup]):
        cleaned = {int(i): g for i, g in dict(groups).items() if not g.is_zero}
        self._items = tuple(sorted(cleaned.items()))
        self._map = dict(self._items)

    @classmethod
    def from_strings(cls, texts: Iterable[str], start: int = 0) -> "GradedAb":
        return cls({start + i: FgAbGroup.parse(t)
                    for i, t in enumerate(texts)})

    def group(self, degree: int) -> FgAbGroup:
        return self._map.get(degree, ZERO)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self._items)

    @property
    def top_degree(self) -> int:
        if not self._items:
            raise ValueError("empty graded group has no top degree")
        return self._items[-1][0]

    @property
    def total_rank(self) -> int:
        return sum(g.rank for _, g in self._items)

    def euler(self) -> int:
        return sum((-1) ** i * g.rank for i, g in self._items)

    def shift(self, n: int) -> "GradedAb":
        return GradedAb({i + n: g for i, g in self._items})

    def direct_sum(self, other: "GradedAb") -> "GradedAb":
        degrees = set(self.support) | set(other.support)
        return GradedAb({i: self.group(i) + other.group(i) for i in degrees})

    def items(self) -> Iterator[tuple[int, FgAbGroup]]:
        return iter(self._items)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GradedAb):
            return NotImplemented
        return self._items == other._items

    def __hash__(self) -> int:
        return hash(self._items)

    def __repr__(self) -> str:
        inner = ", ".join(f"{i}: {g}" for i, g in self._items)
        return f"GradedAb({{{inner}}})"
