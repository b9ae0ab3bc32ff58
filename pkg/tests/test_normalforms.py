import random

import pytest

from flagorbits.flags import (Composition, Flag, act, flags_equal,
                              random_borel_prime, random_flag,
                              random_parabolic, standard_flag)
from flagorbits.invariants import invariant_family, signature
from flagorbits.linalg import Matrix, QQ, gf
from flagorbits.normalforms import (CaseTag, InconsistentSignatureError,
                                    InfinitePairError, NFCase0, NFChain,
                                    NonInjectiveError, UnsupportedCaseError,
                                    borel_elements, case0_normal_forms,
                                    classify_pair, counterexample_pair,
                                    decode_signature_case0, has_catalog,
                                    realize, reduce_by_catalog, reduce_case0,
                                    reduce_case3prime, reduce_flag,
                                    serialize_normal_form, transporter_empty,
                                    triangular_reduce, witness_pair_over)
from flagorbits.orbits import enumerate_orbits


def test_classify_table_rows():
    assert classify_pair(Composition.of(2, 1),
                         Composition.of(1, 1, 1)).label == "III'"
    assert classify_pair(Composition.of(2, 2),
                         Composition.of(1, 3)).label == "0"
    assert classify_pair(Composition.of(1, 1, 1, 1),
                         Composition.of(2, 2)) is None
    t = classify_pair(Composition.of(4, 2), Composition.of(2, 2, 2))
    assert t.label == "II'" and not t.injective
    t = classify_pair(Composition.of(3, 2), Composition.of(1, 2, 2))
    assert t.label == "I'" and t.subcase == "m1=1" and not t.injective
    t = classify_pair(Composition.of(2, 2), Composition.of(1, 2, 1))
    assert t.label == "I'" and t.injective and not has_catalog(t)
    t = classify_pair(Composition.of(2, 2), Composition.of(2, 1, 1))
    assert t.subcase == "m2=1" and has_catalog(t)
    assert classify_pair(Composition.of(1, 1, 2),
                         Composition.of(2, 2)).label == "I"
    assert classify_pair(Composition.of(2, 2, 2),
                         Composition.of(4, 2)).label == "II"
    assert classify_pair(Composition.of(1, 1, 1, 2),
                         Composition.of(4, 1)).label == "III"
    # first-match: a two-block pair with M = 1 is still case 0
    assert classify_pair(Composition.of(3, 1),
                         Composition.of(1, 3)).label == "0"


def test_triangular_reduce_zero_and_identity():
    z = Matrix.zero(QQ, 3, 2)
    red = triangular_reduce(z)
    assert red.indices == ()
    ident = Matrix.identity(QQ, 3)
    red = triangular_reduce(ident)
    assert red.indices == (1, 2, 3)
    assert red.canonical == ident


def test_triangular_reduce_multiply_back():
    rng = random.Random(5)
    for fld in (QQ, gf(3)):
        for _ in range(40):
            rows, cols = rng.randint(1, 4), rng.randint(1, 4)
            data = [[rng.randrange(3) if fld is not QQ
                     else rng.randint(-3, 3) for _ in range(cols)]
                    for _ in range(rows)]
            a = Matrix.from_rows(fld, data)
            red = triangular_reduce(a)
            assert red.left * a * red.right == red.canonical
            # left factor is upper triangular and invertible
            for i in range(rows):
                for j in range(i):
                    assert red.left[i, j] == fld.zero
            assert red.left.is_invertible()
            assert red.right.is_invertible()
            assert list(red.indices) == sorted(red.indices)
            assert len(red.indices) == a.rank()
            for t, idx in enumerate(red.indices):
                col = red.canonical.column(t)
                assert col[idx - 1] == fld.one
                assert sum(1 for x in col if x != fld.zero) == 1


def test_reduce_case0_idempotent_on_catalog():
    nn, mm = Composition.of(2, 2), Composition.of(2, 2)
    for nf in case0_normal_forms(nn, mm):
        f = realize(nf)
        assert reduce_case0(f, nn) == nf


def test_reduce_case0_on_figure_two_nodes():
    nn, mm = Composition.of(2, 2), Composition.of(1, 3)
    cols = {
        (0, 0, 1, 0): ((None, 1),),
        (0, 0, 0, 1): ((None, 2),),
        (1, 0, 0, 0): ((1, None),),
        (0, 1, 0, 0): ((2, None),),
        (1, 0, 1, 0): ((1, 1),),
        (0, 1, 1, 0): ((2, 1),),
        (1, 0, 0, 1): ((1, 2),),
        (0, 1, 0, 1): ((2, 2),),
    }
    for vec, expected in cols.items():
        f = Flag.from_matrix(mm, Matrix.from_columns(QQ, [list(vec)]))
        assert reduce_case0(f, nn).cols == expected


def test_reduce_case0_orbit_sound_random():
    rng = random.Random(11)
    for fld in (QQ, gf(3)):
        for _ in range(60):
            n1, n2 = rng.randint(1, 3), rng.randint(1, 3)
            nn = Composition.of(n1, n2)
            m1 = rng.randint(1, nn.n - 1)
            mm = Composition.of(m1, nn.n - m1)
            f = random_flag(mm, fld, rng)
            nf = reduce_case0(f, nn)
            b = random_borel_prime(nn, fld, rng)
            assert reduce_case0(act(b, f), nn) == nf


def test_reduce_case0_oracle_consistent_gf3():
    # random flags of one sizeable pair against the brute-force partition
    from flagorbits.oracle import oracle_partition
    nn, mm = Composition.of(3, 3), Composition.of(2, 4)
    part = oracle_partition(nn, mm, 3)
    rng = random.Random(23)
    fld = gf(3)
    seen = {}
    for _ in range(200):
        f = random_flag(mm, fld, rng)
        nf = reduce_case0(f, nn)
        cid = part.class_of_flag(f)
        if cid in seen:
            assert seen[cid] == nf
        else:
            assert nf not in seen.values()
            seen[cid] = nf


def test_decode_signature_case0_round_trip():
    rng = random.Random(31)
    for _ in range(40):
        n1, n2 = rng.randint(1, 3), rng.randint(1, 3)
        nn = Composition.of(n1, n2)
        m1 = rng.randint(1, nn.n - 1)
        mm = Composition.of(m1, nn.n - m1)
        fam = invariant_family(nn, mm)
        forms = case0_normal_forms(nn, mm)
        for nf in rng.sample(forms, min(6, len(forms))):
            sig = signature(realize(nf), fam)
            assert decode_signature_case0(sig) == nf


def test_decode_signature_standard_flag():
    nn, mm = Composition.of(2, 2), Composition.of(2, 2)
    fam = invariant_family(nn, mm)
    nf = decode_signature_case0(signature(standard_flag(mm), fam))
    assert nf.r == 0 and nf.s == 0


def test_decode_rejects_inconsistent_signature():
    nn, mm = Composition.of(1, 1), Composition.of(1, 1)
    fam = invariant_family(nn, mm)
    sig = signature(standard_flag(mm), fam)
    broken = type(sig)(fam, tuple(v + 3 for v in sig.values))
    with pytest.raises(InconsistentSignatureError):
        decode_signature_case0(broken)


FIGURE1_MATRICES = [
    ((0, 1, 0), (0, 0, 1), (1, 0, 0)),
    ((1, 0, 0), (0, 0, 1), (0, 1, 0)),
    ((1, 0, 0), (0, 1, 0), (0, 0, 1)),
    ((0, 0, 1), (0, 1, 0), (1, 0, 0)),
    ((1, 1, 0), (0, 0, 1), (1, 0, 0)),
    ((0, 0, 1), (1, 0, 0), (0, 1, 0)),
    ((1, 0, 0), (0, 1, 1), (0, 1, 0)),
    ((0, 1, 0), (1, 0, 0), (0, 0, 1)),
    ((0, 0, 1), (1, 1, 0), (1, 0, 0)),
    ((1, 0, 1), (0, 1, 0), (1, 0, 0)),
    ((0, 1, 0), (1, 0, 1), (1, 0, 0)),
    ((0, 1, 1), (1, 0, 0), (0, 1, 0)),
    ((1, 0, 1), (1, 1, 0), (1, 0, 0)),
]


def figure1_flags(fld=QQ):
    mm = Composition.of(1, 1, 1)
    out = []
    for rows in FIGURE1_MATRICES:
        stored = [row[:2] for row in rows]
        out.append(Flag.from_matrix(mm, Matrix.from_rows(fld, stored)))
    return out


def test_reduce_case3prime_figure_nodes_self():
    nn = Composition.of(2, 1)
    for f in figure1_flags():
        nf = reduce_case3prime(f, nn)
        assert flags_equal(realize(nf), f)


def test_reduce_case3prime_identity_chainless():
    nn, mm = Composition.of(2, 1), Composition.of(1, 1, 1)
    nf = reduce_case3prime(standard_flag(mm), nn)
    assert nf.chain == ()
    assert nf.j0 == 3  # the distinguished column sits in the dropped block


def test_reduce_case3prime_oracle_consistent_gf2():
    from flagorbits.oracle import oracle_partition
    nn, mm = Composition.of(3, 1), Composition.of(1, 1, 2)
    part = oracle_partition(nn, mm, 2)
    rng = random.Random(7)
    fld = gf(2)
    seen = {}
    for _ in range(500):
        f = random_flag(mm, fld, rng)
        nf = reduce_case3prime(f, nn)
        cid = part.class_of_flag(f)
        if cid in seen:
            assert seen[cid] == nf
        else:
            seen[cid] = nf
    assert len(seen) == part.class_count  # 500 samples reach all 33 orbits


def test_reduce_case3prime_swapped_orientation():
    rng = random.Random(3)
    nn, mm = Composition.of(1, 3), Composition.of(2, 1, 1)
    fld = gf(3)
    for _ in range(40):
        f = random_flag(mm, fld, rng)
        nf = reduce_case3prime(f, nn)
        b = random_borel_prime(nn, fld, rng)
        assert reduce_case3prime(act(b, f), nn) == nf


def test_reduce_by_catalog_examples():
    # a line through the third axis: nonzero only in the second row block
    nn, mm = Composition.of(2, 2), Composition.of(1, 3)
    f = Flag.from_matrix(mm, Matrix.from_columns(QQ, [[0, 0, 1, 0]]))
    nf = reduce_by_catalog(f, nn)
    assert flags_equal(realize(nf), f)

    nn2, mm2 = Composition.of(2, 2, 2), Composition.of(2, 4)
    rep = Matrix.from_columns(QQ, [[1, 0, 0, 0, 0, 0], [0, 0, 1, 0, 0, 0]])
    f2 = Flag.from_matrix(mm2, rep)
    nf2 = reduce_by_catalog(f2, nn2)
    assert flags_equal(realize(nf2), f2)


def test_reduce_by_catalog_case1_oracle_consistent():
    from flagorbits.oracle import oracle_partition
    nn, mm = Composition.of(1, 1, 2), Composition.of(2, 2)
    part = oracle_partition(nn, mm, 3)
    rng = random.Random(41)
    fld = gf(3)
    seen = {}
    for _ in range(150):
        f = random_flag(mm, fld, rng)
        nf = reduce_by_catalog(f, nn)
        cid = part.class_of_flag(f)
        if cid in seen:
            assert seen[cid] == nf
        else:
            seen[cid] = nf


def test_reduce_flag_dispatch_and_errors():
    nn, mm = Composition.of(2, 1), Composition.of(1, 1, 1)
    f = standard_flag(mm)
    assert isinstance(reduce_flag(f, nn), NFChain)
    with pytest.raises(InfinitePairError):
        reduce_flag(standard_flag(Composition.of(2, 2)),
                    Composition.of(1, 1, 1, 1))
    with pytest.raises(NonInjectiveError):
        reduce_flag(standard_flag(Composition.of(2, 2, 2)),
                    Composition.of(4, 2))


def test_matching_rows_give_orbit_equal_reducers():
    # pairs matched by several table rows: all applicable reducers agree
    rng = random.Random(59)
    nn, mm = Composition.of(3, 1), Composition.of(1, 3)  # rows 0, III, III'
    for fld in (QQ, gf(2)):
        for _ in range(30):
            f = random_flag(mm, fld, rng)
            via0 = realize(reduce_case0(f, nn), fld)
            via3p = realize(reduce_case3prime(f, nn), fld)
            viacat = realize(reduce_by_catalog(f, nn), fld)
            fam = invariant_family(nn, mm)
            vals = {signature(x, fam).values
                    for x in (via0, via3p, viacat, f)}
            assert len(vals) == 1


def test_realized_catalogs_full_rank_distinct_signatures():
    for nn_parts, mm_parts in [((2, 1), (1, 1, 1)), ((2, 2), (2, 2)),
                               ((1, 1, 2), (2, 2)), ((2, 2), (1, 1, 2))]:
        nn, mm = Composition(nn_parts), Composition(mm_parts)
        cat = enumerate_orbits(nn, mm)
        sigs = {e.sig.values for e in cat.entries}
        assert len(sigs) == len(cat.entries)
        for e in cat.entries:
            assert e.flag.rep.rank() == e.flag.rep.cols


def test_counterexample_pairs_verified():
    for nn_parts, mm_parts in [((3, 2), (1, 2, 2)), ((3, 2), (2, 2, 1)),
                               ((4, 2), (2, 2, 2))]:
        nn, mm = Composition(nn_parts), Composition(mm_parts)
        pair = counterexample_pair(nn, mm)  # construction re-verifies
        fam = invariant_family(nn, mm)
        assert signature(pair.d1, fam).values == signature(pair.d2, fam).values
        assert transporter_empty(pair, 2)
        assert transporter_empty(pair, 3)


def test_counterexample_rejects_injective_case():
    with pytest.raises(ValueError):
        counterexample_pair(Composition.of(2, 1), Composition.of(1, 1, 1))


def test_normal_form_serializations_stable():
    nn, mm = Composition.of(2, 2), Composition.of(1, 3)
    texts = [serialize_normal_form(e.nf)
             for e in enumerate_orbits(nn, mm).entries]
    assert len(set(texts)) == 8
    assert all(t.startswith("case=0 ") for t in texts)
    nn2, mm2 = Composition.of(2, 1), Composition.of(1, 1, 1)
    texts2 = [serialize_normal_form(e.nf)
              for e in enumerate_orbits(nn2, mm2).entries]
    assert all(t.startswith("case=III' ") for t in texts2)


def test_borel_elements_enumeration_order():
    nn = Composition.of(2, 1)
    elems = list(borel_elements(nn, 2))
    assert len(elems) == 2  # (q-1)^3 * q = 2 at q = 2
    nn2 = Composition.of(1,)
    assert len(list(borel_elements(nn2, 3))) == 2  # order q-1
