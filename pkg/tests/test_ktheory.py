"""Integral K-group assembly: symbolic group expressions, the support
filtration on K_0, the high-degree assembly formula, and component tables.

Expected values below were worked out by hand from the published group
computations (Chow tables, Betti numbers, exceptional-collection lengths)
before the module was written.
"""
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qlwb.groups import FgAbGroup, GradedAb
from qlwb.ktheory import (
    K0Result,
    KGroupExpr,
    adams_annihilator,
    assemble_high_kn,
    ch1_torsion_free,
    component_k_table,
    k0_filtration,
    phantom_vanishing,
    strip_exceptional,
)
from qlwb.variety import ChowData, ChowEntry, ComponentRef, VarietyData

G = FgAbGroup.parse

KN = ("K_n(X,Q)",)


# ---------------------------------------------------------------------------
# fixtures


def fano3_chow():
    """Picard-rank-1 Fano 3-fold: CH^* = Z, Z, Z + IJ, Z."""
    return ChowData({
        1: ChowEntry(free_rank=1),
        2: ChowEntry(free_rank=1, divisible=("IJ(X)",),
                     divisible_torsion_free=False),
        3: ChowEntry(free_rank=1),
    })


def cubic4_chow(r=1):
    return ChowData({
        1: ChowEntry(free_rank=1),
        2: ChowEntry(free_rank=r),
        3: ChowEntry(free_rank=1, divisible=("CH_1(X)_hom",),
                     divisible_torsion_free=True),
        4: ChowEntry(free_rank=1),
    })


def cubic5_chow():
    return ChowData({
        1: ChowEntry(free_rank=1),
        2: ChowEntry(free_rank=1),
        3: ChowEntry(free_rank=1, divisible=("IJ(X)",),
                     divisible_torsion_free=False,
                     certificate="adams-motivic"),
        4: ChowEntry(free_rank=1),
        5: ChowEntry(free_rank=1),
    })


def k3_chow(r=3):
    return ChowData({
        1: ChowEntry(free_rank=r),
        2: ChowEntry(free_rank=1, divisible=("CH_0(S)_hom",),
                     divisible_torsion_free=True),
    })


def cubic3_variety():
    return VarietyData(
        name="cubic3", dim=3,
        h_int=GradedAb.from_strings(["Z", "0", "Z", "Z^10", "Z", "0", "Z"]),
        chow=fano3_chow(),
        sod=(ComponentRef("opaque", interval=(1, 1)),
             ComponentRef.exceptional(), ComponentRef.exceptional()),
    )


def v4_variety():
    """Case-(b) shape: one exceptional object, genus 10."""
    return VarietyData(
        name="v4", dim=3,
        h_int=GradedAb.from_strings(["Z", "0", "Z", "Z^20", "Z", "0", "Z"]),
        chow=fano3_chow(),
        sod=(ComponentRef("opaque", interval=(1, 1)),
             ComponentRef.exceptional()),
    )


def cubic4_variety():
    return VarietyData(
        name="cubic4", dim=4,
        h_int=GradedAb.from_strings(
            ["Z", "0", "Z", "0", "Z^23", "0", "Z", "0", "Z"]),
        chow=cubic4_chow(r=1),
        sod=(ComponentRef("opaque", interval=(0, 2)),
             ComponentRef.exceptional(), ComponentRef.exceptional(),
             ComponentRef.exceptional()),
    )


def cubic5_variety():
    return VarietyData(
        name="cubic5", dim=5,
        h_int=GradedAb.from_strings(
            ["Z", "0", "Z", "0", "Z", "Z^42", "Z", "0", "Z", "0", "Z"]),
        chow=cubic5_chow(),
        sod=(ComponentRef("opaque", interval=(0, 1)),
             ComponentRef.exceptional(), ComponentRef.exceptional(),
             ComponentRef.exceptional(), ComponentRef.exceptional()),
    )


# ---------------------------------------------------------------------------
# KGroupExpr


def test_expr_zero_and_defaults():
    e = KGroupExpr()
    assert e.is_zero
    assert e == KGroupExpr.zero()
    assert str(e) == "0"


def test_expr_free_helper():
    assert KGroupExpr.free(4) == KGroupExpr(free_rank=4)
    assert str(KGroupExpr.free(1)) == "Z"
    assert str(KGroupExpr.free(6)) == "Z^6"


def test_expr_validation():
    with pytest.raises(ValueError):
        KGroupExpr(free_rank=-1)
    with pytest.raises(ValueError):
        KGroupExpr(qz_rank=-2)
    with pytest.raises(ValueError):
        KGroupExpr(finite=G("Z + Z/2"))  # finite part must be torsion


def test_expr_divisible_canonical_order():
    a = KGroupExpr(divisible=("IJ(X)", "CH_1(X)_hom"))
    b = KGroupExpr(divisible=("CH_1(X)_hom", "IJ(X)"))
    assert a == b
    assert a.divisible == ("CH_1(X)_hom", "IJ(X)")
    assert hash(a) == hash(b)


def test_expr_equality_is_structural():
    a = KGroupExpr(free_rank=2, finite=G("Z/2"), qz_rank=3,
                   divisible=("IJ(X)",))
    assert a == KGroupExpr(2, G("Z/2"), 3, ("IJ(X)",))
    assert a != KGroupExpr(2, G("Z/2"), 4, ("IJ(X)",))
    assert a != KGroupExpr(2, G("Z/4"), 3, ("IJ(X)",))
    assert a != KGroupExpr(2, G("Z/2"), 3, ())


def test_expr_str_forms():
    assert str(KGroupExpr(free_rank=2, divisible=("IJ(X)",))) == "Z^2 + IJ(X)"
    e = KGroupExpr(finite=G("Z/2"), qz_rank=12, divisible=KN)
    assert str(e) == "Z/2 + (Q/Z)^12 + K_n(X,Q)"
    assert str(KGroupExpr(qz_rank=1)) == "Q/Z"
    assert str(KGroupExpr(free_rank=1, qz_rank=24)) == "Z + (Q/Z)^24"


# ---------------------------------------------------------------------------
# assemble_high_kn


def test_assemble_curve_genus3():
    even, odd = G("Z^2"), G("Z^6")
    n1 = assemble_high_kn(even, odd, 1, 1)
    assert n1 == KGroupExpr(qz_rank=2, divisible=KN)
    n2 = assemble_high_kn(even, odd, 1, 2)
    assert n2 == KGroupExpr(qz_rank=6, divisible=KN)
    assert assemble_high_kn(even, odd, 1, 3) == n1


def test_assemble_enriques():
    even, odd = G("Z^12 + Z/2"), G("Z/2")
    n1 = assemble_high_kn(even, odd, 2, 1)
    assert n1 == KGroupExpr(finite=G("Z/2"), qz_rank=12, divisible=KN)
    n2 = assemble_high_kn(even, odd, 2, 2)
    assert n2 == KGroupExpr(finite=G("Z/2"), qz_rank=0, divisible=KN)


def test_assemble_k3():
    even, odd = G("Z^24"), FgAbGroup()
    assert assemble_high_kn(even, odd, 2, 1) == \
        KGroupExpr(qz_rank=24, divisible=KN)
    assert assemble_high_kn(even, odd, 2, 2) == KGroupExpr(divisible=KN)


def test_assemble_custom_symbol():
    got = assemble_high_kn(G("Z^24"), FgAbGroup(), 2, 3,
                           rational_symbol="K_n(A_X,Q)")
    assert got == KGroupExpr(qz_rank=24, divisible=("K_n(A_X,Q)",))


def test_assemble_threshold_is_hard():
    even, odd = G("Z^4"), G("Z^2")
    with pytest.raises(ValueError):
        assemble_high_kn(even, odd, 1, 0)  # n = 0 is never covered
    with pytest.raises(ValueError):
        assemble_high_kn(even, odd, 5, 2)  # needs n >= 3
    assemble_high_kn(even, odd, 5, 3)  # boundary is allowed


small_group = st.builds(
    lambda r, ds: FgAbGroup.free(r).direct_sum(
        FgAbGroup.parse(" + ".join(f"Z/{d}" for d in ds) or "0")),
    st.integers(0, 5),
    st.lists(st.sampled_from([2, 3, 4, 5, 9]), max_size=3),
)


@given(even=small_group, odd=small_group,
       qldim=st.integers(0, 6), extra=st.integers(0, 3))
@settings(max_examples=300, deadline=None)
def test_assemble_properties(even, odd, qldim, extra):
    n = max(1, qldim - 2) + extra
    got = assemble_high_kn(even, odd, qldim, n)
    assert got.free_rank == 0
    near, far = (even, odd) if n % 2 == 0 else (odd, even)
    assert got.finite == near.torsion_part()
    assert got.qz_rank == far.rank


# ---------------------------------------------------------------------------
# k0_filtration


def test_k0_fano3():
    res = k0_filtration(fano3_chow())
    assert isinstance(res, K0Result)
    assert res.exact
    assert res.uncertified == ()
    assert res.expr == KGroupExpr(free_rank=4, divisible=("IJ(X)",))


def test_k0_k3():
    res = k0_filtration(k3_chow(r=3))
    assert res.exact
    assert res.expr == KGroupExpr(free_rank=5, divisible=("CH_0(S)_hom",))


def test_k0_cubic4():
    res = k0_filtration(cubic4_chow(r=1))
    assert res.exact
    assert res.expr == KGroupExpr(free_rank=5, divisible=("CH_1(X)_hom",))


def test_k0_cubic5_with_certificate():
    res = k0_filtration(cubic5_chow(), split_certificates=("adams-motivic",))
    assert res.exact
    assert res.expr == KGroupExpr(free_rank=6, divisible=("IJ(X)",))


def test_k0_cubic5_without_certificate_is_flagged():
    res = k0_filtration(cubic5_chow())
    assert not res.exact
    assert res.uncertified == (3,)
    # the sum is still reported, just not certified
    assert res.expr == KGroupExpr(free_rank=6, divisible=("IJ(X)",))


def test_k0_unrecognized_certificate_does_not_certify():
    res = k0_filtration(cubic5_chow(), split_certificates=("other-arg",))
    assert not res.exact
    assert res.uncertified == (3,)


def test_k0_coprime_torsion_is_automatic():
    # 3-torsion cannot sit in a 2-torsion kernel
    chow = ChowData({
        1: ChowEntry(free_rank=1),
        2: ChowEntry(free_rank=1),
        3: ChowEntry(free_rank=1, torsion=G("Z/3")),
    })
    res = k0_filtration(chow)
    assert res.exact
    assert res.expr == KGroupExpr(free_rank=4, finite=G("Z/3"))


def test_k0_blocking_torsion_needs_certificate():
    chow = ChowData({
        1: ChowEntry(free_rank=1),
        2: ChowEntry(free_rank=1),
        3: ChowEntry(free_rank=1, torsion=G("Z/2")),
    })
    res = k0_filtration(chow)
    assert not res.exact
    assert res.uncertified == (3,)


def test_k0_factorial_grows_with_codim():
    # at i = 4 the kernel bound is 3! = 6: order 5 is safe, order 3 is not
    base = {1: ChowEntry(free_rank=1), 2: ChowEntry(free_rank=1),
            3: ChowEntry(free_rank=1)}
    ok = k0_filtration(ChowData({**base, 4: ChowEntry(1, torsion=G("Z/5"))}))
    assert ok.exact
    bad = k0_filtration(ChowData({**base, 4: ChowEntry(1, torsion=G("Z/3"))}))
    assert not bad.exact
    assert bad.uncertified == (4,)


def test_k0_unknown_divisible_torsion_blocks():
    # divisible_torsion_free=None must be treated as "may have torsion"
    chow = ChowData({
        1: ChowEntry(free_rank=1),
        2: ChowEntry(free_rank=1),
        3: ChowEntry(free_rank=1, divisible=("IJ(X)",)),
    })
    assert not k0_filtration(chow).exact


def test_k0_codim_zero_is_implicit_z():
    explicit = ChowData({0: ChowEntry(free_rank=1), 1: ChowEntry(free_rank=1),
                         2: ChowEntry(free_rank=1)})
    implicit = ChowData({1: ChowEntry(free_rank=1), 2: ChowEntry(free_rank=1)})
    assert k0_filtration(explicit).expr == k0_filtration(implicit).expr \
        == KGroupExpr(free_rank=3)


def test_k0_wrong_ch0_rejected():
    chow = ChowData({0: ChowEntry(free_rank=2), 1: ChowEntry(free_rank=1)})
    with pytest.raises(ValueError):
        k0_filtration(chow)


def test_k0_missing_codim_rejected():
    chow = ChowData({1: ChowEntry(free_rank=1), 3: ChowEntry(free_rank=1)})
    with pytest.raises(ValueError):
        k0_filtration(chow)


def test_k0_entry_beyond_dim_rejected():
    with pytest.raises(ValueError):
        k0_filtration(fano3_chow(), dim=2)


# ---------------------------------------------------------------------------
# strip_exceptional


def test_strip_fano3_cases():
    k0 = KGroupExpr(free_rank=4, divisible=("IJ(X)",))
    assert strip_exceptional(k0, 2) == \
        KGroupExpr(free_rank=2, divisible=("IJ(X)",))
    assert strip_exceptional(k0, 1) == \
        KGroupExpr(free_rank=3, divisible=("IJ(X)",))


def test_strip_cubic4():
    k0 = KGroupExpr(free_rank=5, divisible=("CH_1(X)_hom",))
    assert strip_exceptional(k0, 3) == \
        KGroupExpr(free_rank=2, divisible=("CH_1(X)_hom",))


def test_strip_preserves_other_summands():
    k0 = KGroupExpr(free_rank=2, finite=G("Z/2"), qz_rank=3,
                    divisible=("IJ(X)",))
    got = strip_exceptional(k0, 1)
    assert got == KGroupExpr(1, G("Z/2"), 3, ("IJ(X)",))
    assert strip_exceptional(k0, 0) == k0


def test_strip_overdraw_is_hard_error():
    k0 = KGroupExpr(free_rank=4, divisible=("IJ(X)",))
    with pytest.raises(ValueError):
        strip_exceptional(k0, 5)
    with pytest.raises(ValueError):
        strip_exceptional(k0, -1)


@st.composite
def expr_and_strips(draw):
    e1 = draw(st.integers(0, 4))
    e2 = draw(st.integers(0, 4))
    free = e1 + e2 + draw(st.integers(0, 4))
    expr = KGroupExpr(
        free_rank=free,
        finite=draw(small_group).torsion_part(),
        qz_rank=draw(st.integers(0, 4)),
        divisible=tuple(draw(st.lists(
            st.sampled_from(["IJ(X)", "CH_1(X)_hom"]), max_size=2))),
    )
    return expr, e1, e2


@given(expr_and_strips())
@settings(max_examples=300, deadline=None)
def test_strip_additivity(data):
    expr, e1, e2 = data
    assert strip_exceptional(strip_exceptional(expr, e1), e2) == \
        strip_exceptional(expr, e1 + e2)


# ---------------------------------------------------------------------------
# adams_annihilator


def test_adams_weight_3_vs_2():
    # |2^3 - 2^2| = 4, |3^3 - 3^2| = 18, gcd = 2
    assert adams_annihilator(3, 2, [2, 3]) == 2


def test_adams_weight_3_vs_1():
    # |2^3 - 2| = 6, |3^3 - 3| = 24, gcd = 6
    assert adams_annihilator(3, 1, [2, 3]) == 6


def test_adams_equal_weights_no_constraint():
    assert adams_annihilator(2, 2, [2, 3, 5]) == 0


def test_adams_single_k():
    assert adams_annihilator(3, 2, [2]) == 4
    assert adams_annihilator(2, 0, [2]) == 3


def test_adams_validation():
    with pytest.raises(ValueError):
        adams_annihilator(3, 2, [])
    with pytest.raises(ValueError):
        adams_annihilator(3, 2, [1, 2])
    with pytest.raises(ValueError):
        adams_annihilator(-1, 0, [2])


@given(a=st.integers(0, 8), b=st.integers(0, 8),
       ks=st.lists(st.integers(2, 9), min_size=1, max_size=4))
@settings(max_examples=1000, deadline=None)
def test_adams_divides_every_difference(a, b, ks):
    ann = adams_annihilator(a, b, ks)
    if a == b:
        assert ann == 0
    else:
        assert ann > 0
        for k in ks:
            assert (k ** a - k ** b) % ann == 0


# ---------------------------------------------------------------------------
# ch1_torsion_free / phantom_vanishing


def test_ch1_cubic4_clause():
    assert ch1_torsion_free(True, True, False).is_zero
    assert ch1_torsion_free(True, False, True).is_zero
    assert ch1_torsion_free(True, True, True).is_zero


def test_ch1_needs_trivial_ch0():
    assert ch1_torsion_free(False, True, True).is_undetermined
    assert ch1_torsion_free(None, True, True).is_undetermined


def test_ch1_needs_a_vanishing_clause():
    t = ch1_torsion_free(True, False, False)
    assert t.is_undetermined
    assert t.reason
    assert ch1_torsion_free(True, None, None).is_undetermined


def test_phantom_vanishing():
    assert phantom_vanishing(KGroupExpr.zero(), 0).is_zero
    assert phantom_vanishing(KGroupExpr.zero(), 1).is_undetermined
    assert phantom_vanishing(KGroupExpr.free(1), 0).is_undetermined


# ---------------------------------------------------------------------------
# component_k_table


def test_table_cubic3():
    table = component_k_table(cubic3_variety(), 1, range(0, 5))
    ij = ("IJ(X)",)
    assert table[0] == KGroupExpr(free_rank=2, divisible=ij)
    assert table[1] == KGroupExpr(qz_rank=2, divisible=KN)
    assert table[2] == KGroupExpr(qz_rank=10, divisible=KN)  # 2g, g = 5
    assert table[3] == table[1]
    assert table[4] == table[2]


def test_table_v4_one_exceptional():
    table = component_k_table(v4_variety(), 1, [0, 1, 2])
    assert table[0] == KGroupExpr(free_rank=3, divisible=("IJ(X)",))
    assert table[1] == KGroupExpr(qz_rank=3, divisible=KN)
    assert table[2] == KGroupExpr(qz_rank=20, divisible=KN)


def test_table_cubic4():
    table = component_k_table(cubic4_variety(), 2, [0, 1, 2],
                              rational_symbol="K_n(A_X,Q)")
    a = ("K_n(A_X,Q)",)
    assert table[0] == KGroupExpr(free_rank=2, divisible=("CH_1(X)_hom",))
    assert table[1] == KGroupExpr(qz_rank=24, divisible=a)
    assert table[2] == KGroupExpr(divisible=a)  # KU^odd = 0: no Q/Z at all


def test_table_cubic5():
    table = component_k_table(cubic5_variety(), 1, range(0, 4),
                              split_certificates=("adams-motivic",))
    assert table[0] == KGroupExpr(free_rank=2, divisible=("IJ(X)",))
    assert table[1] == KGroupExpr(qz_rank=2, divisible=KN)
    assert table[2] == KGroupExpr(qz_rank=42, divisible=KN)
    assert table[3] == table[1]


def test_table_k0_row_requires_certified_filtration():
    with pytest.raises(ValueError):
        component_k_table(cubic5_variety(), 1, [0])
    # higher rows do not need the Chow certificates
    table = component_k_table(cubic5_variety(), 1, [1])
    assert table[1] == KGroupExpr(qz_rank=2, divisible=KN)


def test_table_qz_parity_matches_component_ku():
    for v, hi, certs in [(cubic3_variety(), 1, ()),
                         (cubic4_variety(), 2, ()),
                         (cubic5_variety(), 1, ("adams-motivic",))]:
        e = sum(1 for c in v.sod if c.kind == "exceptional")
        even = sum(v.betti(i) for i in range(0, 2 * v.dim + 1, 2)) - e
        odd = sum(v.betti(i) for i in range(1, 2 * v.dim + 1, 2))
        table = component_k_table(v, hi, [1, 2], split_certificates=certs)
        assert table[1].qz_rank == even
        assert table[2].qz_rank == odd


def test_table_curve_component_adjusts_ku():
    v = VarietyData(
        name="blown", dim=3,
        h_int=GradedAb.from_strings(
            ["Z", "Z^2", "Z^2", "Z^4", "Z^2", "Z^2", "Z"]),
        sod=(ComponentRef("opaque", interval=(1, 1)),
             ComponentRef.exceptional(), ComponentRef.curve(2)),
    )
    table = component_k_table(v, 1, [1, 2])
    # even 6 - 1 - 2 = 3, odd 8 - 4 = 4
    assert table[1] == KGroupExpr(qz_rank=3, divisible=KN)
    assert table[2] == KGroupExpr(qz_rank=4, divisible=KN)
    with pytest.raises(ValueError):
        component_k_table(v, 1, [0])  # K_0 bookkeeping not supported here


def test_table_threshold_propagates():
    with pytest.raises(ValueError):
        component_k_table(cubic5_variety(), 4, [1])  # needs n >= 2


def test_table_needs_sod():
    v = VarietyData(name="bare", dim=2,
                    h_int=GradedAb.from_strings(["Z", "0", "Z", "0", "Z"]))
    with pytest.raises(ValueError):
        component_k_table(v, 0, [1])


def test_table_needs_unique_distinguished_component():
    v = VarietyData(
        name="two", dim=3,
        h_int=GradedAb.from_strings(["Z", "0", "Z", "0", "Z", "0", "Z"]),
        sod=(ComponentRef("opaque", interval=(0, 1)),
             ComponentRef("opaque", interval=(0, 1))),
    )
    with pytest.raises(ValueError):
        component_k_table(v, 1, [1])


def test_table_needs_chow_for_degree_zero():
    v = VarietyData(
        name="nochow", dim=3,
        h_int=GradedAb.from_strings(["Z", "0", "Z", "0", "Z", "0", "Z"]),
        sod=(ComponentRef("opaque", interval=(0, 1)),
             ComponentRef.exceptional()),
    )
    with pytest.raises(ValueError):
        component_k_table(v, 1, [0, 1])
