"""Exact intersection theory on Grassmannians Gr(k, n).

Cohomology classes are integer (or rational, for Chern characters)
combinations of Schubert classes sigma_lambda indexed by partitions in the
k x (n-k) box.  Products go through the Jacobi-Trudi determinant and the
Pieri rule, entirely inside the ring of symmetric functions in k variables,
with the box truncation applied only where it is exact; no floating point
anywhere.

Bundles are formal expressions built from the tautological sub- and
quotient bundles; they carry a rank and a Chern character, and the
lambda-operations (exterior and symmetric powers) are computed from Adams
operations by the Newton recurrences.  Riemann-Roch integrals must come
out integral, and a fractional result raises rather than rounds.

``hodge_middle`` computes the middle Hodge row of a smooth intersection of
Gr(k, n) with c general hyperplanes in the Pluecker embedding: the
off-middle Hodge numbers come from the ambient Grassmannian by the
Lefschetz hyperplane theorem, and the middle row is solved from
Euler characteristics chi(Omega^p) obtained by pushing the conormal-sequence
filtration and the Koszul resolution back to the Grassmannian.

>>> multiply(sigma(1), sigma(1), 2, 4) == sigma(2) + sigma(1, 1)
True
>>> integrate(sigma(5, 5), 2, 7)
1
"""
from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Optional, Union

Scalar = Union[int, Fraction]

__all__ = [
    "CohClass",
    "BundleExpr",
    "sigma",
    "partitions_in_box",
    "multiply",
    "integrate",
    "chern",
    "chi_hrr",
    "hodge_middle",
]


def _validate_partition(parts: tuple[int, ...]) -> tuple[int, ...]:
    if any(p <= 0 for p in parts):
        raise ValueError(f"partition parts must be positive: {parts}")
    if any(parts[i] < parts[i + 1] for i in range(len(parts) - 1)):
        raise ValueError(f"partition must be weakly decreasing: {parts}")
    return tuple(parts)


def partitions_in_box(k: int, w: int) -> Iterator[tuple[int, ...]]:
    """All partitions with at most k parts, each at most w, by degree.

    >>> list(partitions_in_box(2, 2))
    [(), (1,), (1, 1), (2,), (2, 1), (2, 2)]
    """
    out = []
    def rec(prefix, maxpart):
        out.append(tuple(prefix))
        if len(prefix) < k:
            for p in range(1, maxpart + 1):
                rec(prefix + [p], p)
    rec([], w)
    return iter(sorted(out, key=lambda lam: (sum(lam), lam)))


class CohClass:
    """A linear combination of Schubert classes, not tied to a fixed box.

    Coefficients may be integers or Fractions; products and integrals live
    in the free functions below, which carry the (k, n) context.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Optional[dict] = None):
        clean = {}
        for lam, c in (coeffs or {}).items():
            if c != 0:
                clean[_validate_partition(tuple(lam))] = c
        self.coeffs = clean

    @classmethod
    def zero(cls) -> "CohClass":
        return cls()

    def degree_part(self, j: int) -> "CohClass":
        return CohClass({lam: c for lam, c in self.coeffs.items()
                         if sum(lam) == j})

    def __add__(self, other: "CohClass") -> "CohClass":
        merged = dict(self.coeffs)
        for lam, c in other.coeffs.items():
            merged[lam] = merged.get(lam, 0) + c
        return CohClass(merged)

    def __neg__(self) -> "CohClass":
        return CohClass({lam: -c for lam, c in self.coeffs.items()})

    def __sub__(self, other: "CohClass") -> "CohClass":
        return self + (-other)

    def scale(self, a: Scalar) -> "CohClass":
        return CohClass({lam: a * c for lam, c in self.coeffs.items()})

    def __rmul__(self, a: Scalar) -> "CohClass":
        if not isinstance(a, (int, Fraction)):
            return NotImplemented
        return self.scale(a)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CohClass):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None  # mutable container semantics; never used as a key

    def __repr__(self) -> str:
        return f"CohClass({self.coeffs!r})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        bits = []
        for lam in sorted(self.coeffs, key=lambda l: (sum(l), l)):
            c = self.coeffs[lam]
            name = "s(" + ",".join(map(str, lam)) + ")"
            bits.append(name if c == 1 else f"{c}*{name}")
        return " + ".join(bits)


def sigma(*parts: int) -> CohClass:
    """The Schubert class attached to one partition; sigma() is the unit.

    >>> str(sigma(3, 2))
    's(3,2)'
    """
    return CohClass({_validate_partition(parts): 1})


# ---------------------------------------------------------------------------
# products: Jacobi-Trudi + Pieri in k variables, box truncation at the end


def _pieri_h(lam: tuple[int, ...], m: int, k: int,
             cap: int) -> list[tuple[int, ...]]:
    """Horizontal strips of size m on lam, at most k rows, parts <= cap.

    The cap is exact here: adding strips never shrinks the first part, so
    any partition that once exceeds the cap can only produce out-of-box
    classes, which the quotient kills anyway.
    """
    padded = list(lam) + [0] * (k - len(lam))
    results: list[tuple[int, ...]] = []

    def rec(i: int, remaining: int, built: list[int]):
        if i == k:
            if remaining == 0:
                results.append(tuple(p for p in built if p))
            return
        low = padded[i]
        high = padded[i - 1] if i > 0 else cap
        high = min(high, low + remaining, cap)
        for new in range(low, high + 1):
            built.append(new)
            rec(i + 1, remaining - (new - low), built)
            built.pop()

    rec(0, m, [])
    return results


def _jacobi_trudi_terms(mu: tuple[int, ...]) -> list[tuple[int, tuple[int, ...]]]:
    """Expand s_mu = det(h_{mu_i + j - i}) into signed monomials in the h's."""
    ell = len(mu)
    terms = []
    for perm in itertools.permutations(range(ell)):
        sign = 1
        for a in range(ell):
            for b in range(a + 1, ell):
                if perm[a] > perm[b]:
                    sign = -sign
        hs = []
        dead = False
        for i in range(ell):
            m = mu[i] + perm[i] - i
            if m < 0:
                dead = True
                break
            if m > 0:
                hs.append(m)
        if not dead:
            terms.append((sign, tuple(hs)))
    return terms


@lru_cache(maxsize=None)
def _basis_product(lam: tuple[int, ...], mu: tuple[int, ...], k: int,
                   n: int) -> tuple[tuple[tuple[int, ...], int], ...]:
    cap = n - k
    acc: dict[tuple[int, ...], int] = {}
    for sign, hs in _jacobi_trudi_terms(mu):
        current = {lam: sign}
        for m in hs:
            nxt: dict[tuple[int, ...], int] = {}
            for nu, c in current.items():
                for rho in _pieri_h(nu, m, k, cap):
                    nxt[rho] = nxt.get(rho, 0) + c
            current = nxt
        for nu, c in current.items():
            acc[nu] = acc.get(nu, 0) + c
    return tuple(sorted((nu, c) for nu, c in acc.items() if c != 0))


def _check_in_box(a: CohClass, k: int, n: int) -> None:
    for lam in a.coeffs:
        if len(lam) > k or (lam and lam[0] > n - k):
            raise ValueError(f"class {lam} does not fit the "
                             f"{k} x {n - k} box of Gr({k},{n})")


def multiply(a: CohClass, b: CohClass, k: int, n: int) -> CohClass:
    """Cup product in H^*(Gr(k, n)).

    >>> multiply(sigma(1), sigma(1), 2, 4) == sigma(2) + sigma(1, 1)
    True
    """
    _check_in_box(a, k, n)
    _check_in_box(b, k, n)
    out: dict[tuple[int, ...], Scalar] = {}
    for lam, ca in a.coeffs.items():
        for mu, cb in b.coeffs.items():
            # expand the factor with fewer rows as a determinant
            base, det = (lam, mu) if len(mu) <= len(lam) else (mu, lam)
            for nu, c in _basis_product(base, det, k, n):
                out[nu] = out.get(nu, 0) + ca * cb * c
    return CohClass(out)


def integrate(a: CohClass, k: int, n: int) -> int:
    """Coefficient of the top Schubert class; fractional totals are a bug.

    >>> integrate(sigma(2, 2), 2, 4)
    1
    """
    _check_in_box(a, k, n)
    top = ((n - k),) * k
    c = a.coeffs.get(top, 0)
    if c != int(c):
        raise ValueError(f"non-integer integral {c}; "
                         "characteristic-class algebra is inconsistent")
    return int(c)


@lru_cache(maxsize=None)
def _sigma1_power(k: int, n: int, m: int) -> CohClass:
    if m == 0:
        return sigma()
    return multiply(_sigma1_power(k, n, m - 1), sigma(1), k, n)


# ---------------------------------------------------------------------------
# bundles


class BundleExpr:
    """A formal bundle on Gr(k, n): a rank plus a Chern character.

    Closed under duals, sums, tensor products, twists, and exterior and
    symmetric powers; the last two are computed from Adams operations via
    the Newton recurrences, with exact rational arithmetic.
    """

    __slots__ = ("k", "n", "rank", "ch")

    def __init__(self, k: int, n: int, rank: int, ch: CohClass):
        ch0 = ch.coeffs.get((), 0)
        if ch0 != rank:
            raise ValueError(f"degree-0 Chern character {ch0} "
                             f"disagrees with rank {rank}")
        self.k = k
        self.n = n
        self.rank = rank
        self.ch = ch

    # -- constructors

    @classmethod
    def trivial(cls, k: int, n: int, r: int = 1) -> "BundleExpr":
        return cls(k, n, r, sigma().scale(r))

    @classmethod
    def quot(cls, k: int, n: int) -> "BundleExpr":
        """Tautological quotient bundle; its Chern classes are the
        single-row Schubert classes."""
        e = [sigma()] + [sigma(m) for m in range(1, n - k + 1)]
        ch = _ch_from_chern(e, n - k, k, n)
        return cls(k, n, n - k, ch)

    @classmethod
    def sub(cls, k: int, n: int) -> "BundleExpr":
        """Tautological subbundle, from 0 -> S -> O^n -> Q -> 0."""
        q = cls.quot(k, n)
        return cls(k, n, k, sigma().scale(n) - q.ch)

    @classmethod
    def o(cls, k: int, n: int, t: int = 1) -> "BundleExpr":
        """The line bundle O(t) of the Pluecker embedding: ch = exp(t s(1))."""
        dtop = k * (n - k)
        ch = CohClass.zero()
        for m in range(dtop + 1):
            ch = ch + _sigma1_power(k, n, m).scale(
                Fraction(t ** m, math.factorial(m)))
        return cls(k, n, 1, ch)

    # -- structure

    def _like(self, rank: Scalar, ch: CohClass) -> "BundleExpr":
        if rank != int(rank):
            raise ValueError(f"non-integer rank {rank}")
        return BundleExpr(self.k, self.n, int(rank), ch)

    def _require_same_space(self, other: "BundleExpr") -> None:
        if (self.k, self.n) != (other.k, other.n):
            raise ValueError("bundles live on different Grassmannians")

    def __add__(self, other: "BundleExpr") -> "BundleExpr":
        self._require_same_space(other)
        return self._like(self.rank + other.rank, self.ch + other.ch)

    def __mul__(self, other: "BundleExpr") -> "BundleExpr":
        self._require_same_space(other)
        return self._like(self.rank * other.rank,
                          multiply(self.ch, other.ch, self.k, self.n))

    def dual(self) -> "BundleExpr":
        ch = CohClass({lam: ((-1) ** sum(lam)) * c
                       for lam, c in self.ch.coeffs.items()})
        return self._like(self.rank, ch)

    def twist(self, t: int) -> "BundleExpr":
        return self * BundleExpr.o(self.k, self.n, t)

    def _adams(self, j: int) -> "BundleExpr":
        ch = CohClass({lam: (j ** sum(lam)) * c
                       for lam, c in self.ch.coeffs.items()})
        return self._like(self.rank, ch)

    def exterior(self, p: int) -> "BundleExpr":
        """Lambda^p, by p * e_p = sum_i (-1)^{i-1} psi^i * e_{p-i}."""
        if p < 0:
            raise ValueError("exterior power index must be >= 0")
        powers = [BundleExpr.trivial(self.k, self.n, 1)]
        for q in range(1, p + 1):
            acc_rank: Scalar = 0
            acc_ch = CohClass.zero()
            for i in range(1, q + 1):
                term = self._adams(i) * powers[q - i]
                s = (-1) ** (i - 1)
                acc_rank += s * term.rank
                acc_ch = acc_ch + term.ch.scale(s)
            powers.append(self._like(Fraction(acc_rank, q),
                                     acc_ch.scale(Fraction(1, q))))
        return powers[p]

    def sym(self, p: int) -> "BundleExpr":
        """Sym^p, by p * h_p = sum_i psi^i * h_{p-i}."""
        if p < 0:
            raise ValueError("symmetric power index must be >= 0")
        powers = [BundleExpr.trivial(self.k, self.n, 1)]
        for q in range(1, p + 1):
            acc_rank: Scalar = 0
            acc_ch = CohClass.zero()
            for i in range(1, q + 1):
                term = self._adams(i) * powers[q - i]
                acc_rank += term.rank
                acc_ch = acc_ch + term.ch
            powers.append(self._like(Fraction(acc_rank, q),
                                     acc_ch.scale(Fraction(1, q))))
        return powers[p]

    def __repr__(self) -> str:
        return (f"BundleExpr(Gr({self.k},{self.n}), rank={self.rank}, "
                f"ch={self.ch})")


def _ch_from_chern(e: list[CohClass], r: int, k: int, n: int) -> CohClass:
    """Chern character from Chern classes via Newton's identities."""
    dtop = k * (n - k)
    p: list[CohClass] = [CohClass.zero()]
    for m in range(1, dtop + 1):
        em = e[m] if m < len(e) else CohClass.zero()
        acc = em.scale(((-1) ** (m - 1)) * m)
        for i in range(1, m):
            ei = e[i] if i < len(e) else CohClass.zero()
            acc = acc + multiply(ei, p[m - i], k, n).scale((-1) ** (i - 1))
        p.append(acc)
    ch = sigma().scale(r)
    for m in range(1, dtop + 1):
        ch = ch + p[m].scale(Fraction(1, math.factorial(m)))
    return ch


def _as_int_class(a: CohClass, what: str) -> CohClass:
    out = {}
    for lam, c in a.coeffs.items():
        if c != int(c):
            raise ValueError(f"non-integer {what} coefficient {c} at {lam}")
        out[lam] = int(c)
    return CohClass(out)


def chern(b: BundleExpr, k: int, n: int) -> list[CohClass]:
    """Chern classes c_0, ..., c_top from the Chern character.

    >>> chern(BundleExpr.quot(2, 4), 2, 4)[1] == sigma(1)
    True
    """
    if (b.k, b.n) != (k, n):
        raise ValueError("bundle does not live on this Grassmannian")
    dtop = k * (n - k)
    p = [CohClass.zero()]
    for m in range(1, dtop + 1):
        p.append(b.ch.degree_part(m).scale(math.factorial(m)))
    e = [sigma()]
    for j in range(1, dtop + 1):
        acc = CohClass.zero()
        for i in range(1, j + 1):
            acc = acc + multiply(p[i], e[j - i], k, n).scale((-1) ** (i - 1))
        e.append(acc.scale(Fraction(1, j)))
    return [_as_int_class(c, "Chern-class") for c in e]


# ---------------------------------------------------------------------------
# Riemann-Roch


@lru_cache(maxsize=None)
def _todd_tangent(k: int, n: int) -> CohClass:
    dtop = k * (n - k)
    tangent = BundleExpr.sub(k, n).dual() * BundleExpr.quot(k, n)
    # series of x / (1 - e^{-x}), then its log, all up to degree dtop
    u = [Fraction((-1) ** j, math.factorial(j + 1)) for j in range(dtop + 1)]
    g = [Fraction(1)] + [Fraction(0)] * dtop
    for m in range(1, dtop + 1):
        g[m] = -sum(u[j] * g[m - j] for j in range(1, m + 1))
    w = [Fraction(0)] + g[1:]          # g - 1
    logg = [Fraction(0)] * (dtop + 1)
    wpow = [Fraction(1)] + [Fraction(0)] * dtop
    for r in range(1, dtop + 1):
        nxt = [Fraction(0)] * (dtop + 1)
        for a2 in range(dtop + 1):
            if wpow[a2] == 0:
                continue
            for b2 in range(1, dtop + 1 - a2):
                nxt[a2 + b2] += wpow[a2] * w[b2]
        wpow = nxt
        for m in range(dtop + 1):
            logg[m] += Fraction((-1) ** (r - 1), r) * wpow[m]
    log_td = CohClass.zero()
    for m in range(1, dtop + 1):
        log_td = log_td + tangent.ch.degree_part(m).scale(
            logg[m] * math.factorial(m))
    td = sigma()
    pw = sigma()
    for r in range(1, dtop + 1):
        pw = multiply(pw, log_td, k, n)
        td = td + pw.scale(Fraction(1, math.factorial(r)))
    return td


def chi_hrr(b: BundleExpr, k: int, n: int) -> int:
    """Euler characteristic by Riemann-Roch: the top piece of ch(b) td(T).

    >>> chi_hrr(BundleExpr.o(2, 4, 1), 2, 4)
    6
    """
    if (b.k, b.n) != (k, n):
        raise ValueError("bundle does not live on this Grassmannian")
    return integrate(multiply(b.ch, _todd_tangent(k, n), k, n), k, n)


# ---------------------------------------------------------------------------
# Hodge numbers of linear sections


def hodge_middle(k: int, n: int, c: int) -> list[int]:
    """Middle Hodge row (h^{0,d}, ..., h^{d,0}) of a smooth intersection of
    Gr(k, n) with c general hyperplanes, d = k(n-k) - c.

    Everything off the middle row restricts from the Grassmannian, so each
    chi(Omega^p) pins down the one unknown h^{p, d-p}.  The chi's are
    computed on the ambient space: the conormal sequence filters
    Lambda^p Omega_Gr|_X with graded pieces Omega^{p-i}_X(-i), giving a
    triangular system over twists, and the Koszul resolution converts each
    chi on X into an alternating sum of chi's on Gr(k, n).

    >>> hodge_middle(2, 4, 1)
    [0, 0, 0, 0]
    """
    if c < 0:
        raise ValueError("number of hyperplanes must be >= 0")
    dtop = k * (n - k)
    d = dtop - c
    if d < 1:
        raise ValueError(
            f"{c} hyperplanes leave dimension {d}; need at least a curve")

    counts = [0] * (dtop + 1)
    for lam in partitions_in_box(k, n - k):
        counts[sum(lam)] += 1

    omega = (BundleExpr.sub(k, n).dual() * BundleExpr.quot(k, n)).dual()
    ext = [omega.exterior(p) for p in range(d + 1)]

    @lru_cache(maxsize=None)
    def chi_on_section(p: int, t: int) -> int:
        """chi_X of Lambda^p Omega_Gr|_X (t), via Koszul on the ambient."""
        total = 0
        for j in range(c + 1):
            total += ((-1) ** j) * math.comb(c, j) * \
                chi_hrr(ext[p].twist(t - j), k, n)
        return total

    @lru_cache(maxsize=None)
    def chi_omega(p: int, t: int) -> int:
        """chi(Omega^p_X(t)), peeling the conormal filtration."""
        total = chi_on_section(p, t)
        for i in range(1, min(p, c) + 1):
            total -= math.comb(c, i) * chi_omega(p - i, t - i)
        return total

    row = []
    for p in range(d + 1):
        if 2 * p == d:
            off_middle = 0
        else:
            off_middle = ((-1) ** p) * counts[min(p, d - p)]
        row.append(((-1) ** (d - p)) * (chi_omega(p, 0) - off_middle))
    return row
