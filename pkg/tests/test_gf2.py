import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import bit_rows
from cyclespan.gf2 import (
    DimensionError,
    EchelonBasis,
    Gf2Matrix,
    Gf2Vector,
    coset_max_weight,
    coset_min_weight,
    in_rowspace,
    intersect,
    lex_less,
    nullspace,
    reduce,
    reduce_bits,
    span_sum,
)


def basis(ambient, *rows):
    return reduce(Gf2Matrix.from_strings(rows, ambient))


def V(s):
    return Gf2Vector.from_string(s)


class TestVector:
    def test_string_roundtrip(self):
        assert str(V("10110")) == "10110"
        assert V("110").support == (0, 1)

    def test_weight_and_dot(self):
        assert V("1101").weight == 3
        assert V("1100").dot(V("0110")) == 1
        assert V("1100").dot(V("1100")) == 0

    def test_out_of_range_support(self):
        with pytest.raises(ValueError):
            Gf2Vector(3, 0b1000)

    def test_length_mismatch(self):
        with pytest.raises(DimensionError):
            V("11") + V("110")

    def test_matrix_rejects_ragged(self):
        with pytest.raises(DimensionError):
            Gf2Matrix(3, (V("11"),))


class TestReduce:
    def test_identity(self):
        B = basis(3, "100", "010", "001")
        assert B.rank == 3 and B.pivots == (0, 1, 2)

    def test_zero_matrix(self):
        B = basis(5, *["00000"] * 4)
        assert B.rank == 0 and B.rows == ()

    def test_dependent_third_row(self):
        assert basis(3, "110", "011", "101").rank == 2

    @given(bit_rows())
    def test_rref_shape_and_rank(self, mr):
        m, rows = mr
        B = reduce_bits(m, rows)
        assert B.rank == oracles.rank(rows, m)
        assert list(B.pivots) == sorted(B.pivots)
        for c, r in zip(B.pivots, B.rows):
            assert (r & -r).bit_length() - 1 == c
            # each pivot column has a single one
            assert sum((s >> c) & 1 for s in B.rows) == 1
        for r in rows:
            assert B.contains_bits(r)


class TestMembership:
    def test_zero_always(self):
        assert in_rowspace(basis(3, "111"), V("000"))

    def test_own_row(self):
        assert in_rowspace(basis(3, "111"), V("111"))

    def test_not_member(self):
        assert not in_rowspace(basis(3, "111"), V("110"))

    def test_mismatch(self):
        with pytest.raises(DimensionError):
            in_rowspace(basis(3, "111"), V("11"))


class TestNullspace:
    def test_identity_gives_empty(self):
        assert nullspace(basis(4, "1000", "0100", "0010", "0001")).rank == 0

    def test_empty_gives_full(self):
        assert nullspace(EchelonBasis(4)).rank == 4

    def test_span_111(self):
        N = nullspace(basis(3, "111"))
        assert N.rank == 2
        assert oracles.span(N.rows) == {0b000, 0b011, 0b101, 0b110}

    @given(bit_rows())
    def test_rank_nullity(self, mr):
        m, rows = mr
        B = reduce_bits(m, rows)
        N = nullspace(B)
        assert B.rank + N.rank == m
        for a in B.rows:
            for b in N.rows:
                assert (a & b).bit_count() % 2 == 0
        assert sorted(oracles.span(N.rows)) == sorted(oracles.span(oracles.nullspace(rows, m)))

    @given(bit_rows())
    def test_double_complement(self, mr):
        m, rows = mr
        B = reduce_bits(m, rows)
        NN = nullspace(nullspace(B))
        assert NN.rows == B.rows


class TestIntersect:
    def test_self(self):
        A = basis(4, "1100", "0111")
        assert intersect(A, A).rows == A.rows

    def test_disjoint_supports(self):
        assert intersect(basis(4, "1100"), basis(4, "0011")).rank == 0

    def test_k4_cycle_even(self):
        # triangles of K_4 on edges 01,02,03,12,13,23
        C = basis(6, "110100", "101010", "000111")
        D = reduce_bits(6, [0b11 << i for i in range(5)])
        I = intersect(C, D)
        assert I.rank == 2
        assert oracles.span(I.rows) == {x for x in oracles.span(C.rows) if x.bit_count() % 2 == 0}

    @given(bit_rows(max_m=10, max_rows=6), st.lists(st.integers(0, 2**10 - 1), max_size=6))
    def test_dimension_formula(self, mr, other):
        m, rows = mr
        other = [x & ((1 << m) - 1) for x in other]
        A, B = reduce_bits(m, rows), reduce_bits(m, other)
        I = intersect(A, B)
        assert A.rank + B.rank == I.rank + span_sum(A, B).rank
        assert set(oracles.span(I.rows)) == oracles.span(A.rows) & oracles.span(B.rows)


class TestCoset:
    def test_zero(self):
        v, cert = coset_min_weight(basis(3, "111"), V("000"))
        assert v.weight == 0 and cert

    def test_trivial_space(self):
        v, _ = coset_min_weight(EchelonBasis(4), V("1011"))
        assert str(v) == "1011"

    def test_span_111(self):
        v, cert = coset_min_weight(basis(3, "111"), V("110"))
        assert str(v) == "001" and cert
        w, _ = coset_max_weight(basis(3, "111"), V("110"))
        assert str(w) == "110"

    def test_max_trivial_and_full(self):
        assert str(coset_max_weight(EchelonBasis(3), V("010"))[0]) == "010"
        full = basis(3, "100", "010", "001")
        assert str(coset_max_weight(full, V("000"))[0]) == "111"

    def test_lex_tie_break(self):
        # coset {1100, 0011}: both weight 2, 1100 has the lexicographically smaller support
        v, _ = coset_min_weight(basis(4, "1111"), V("0011"))
        assert str(v) == "1100"
        assert lex_less(0b0011, 0b1100)  # support (0,1) precedes (2,3)

    def test_mismatch(self):
        with pytest.raises(DimensionError):
            coset_min_weight(basis(3, "111"), V("11"))

    @given(bit_rows(max_m=16, max_rows=10), st.integers(0, 2**16 - 1))
    def test_matches_exhaustive(self, mr, v):
        m, rows = mr
        v &= (1 << m) - 1
        B = reduce_bits(m, rows)
        got, cert = coset_min_weight(B, Gf2Vector(m, v))
        assert cert
        assert got.bits == oracles.min_coset(rows, v)

    @given(bit_rows(max_m=14, max_rows=8), st.integers(0, 2**14 - 1))
    def test_max_is_complemented_min(self, mr, v):
        m, rows = mr
        v &= (1 << m) - 1
        B = reduce_bits(m, rows)
        hi, _ = coset_max_weight(B, Gf2Vector(m, v))
        lo, _ = coset_min_weight(B, Gf2Vector(m, v) + Gf2Vector.ones(m))
        assert hi.weight == m - lo.weight
        assert B.contains_bits(hi.bits ^ v)

    def test_numpy_path_matches_python_path(self):
        # dimension above the pure-python enumeration limit, exact and certified
        import random

        rnd = random.Random(5)
        m = 70
        rows = [rnd.getrandbits(m) for _ in range(16)]
        v = rnd.getrandbits(m)
        B = reduce_bits(m, rows)
        got, cert = coset_min_weight(B, Gf2Vector(m, v))
        assert cert
        assert got.bits == oracles.min_coset(rows, v)

    def test_heuristic_uncertified_but_in_coset(self):
        import random

        rnd = random.Random(9)
        m = 60
        rows = [rnd.getrandbits(m) for _ in range(20)]
        v = rnd.getrandbits(m)
        B = reduce_bits(m, rows)
        got, cert = coset_min_weight(B, Gf2Vector(m, v), exact_dim_cap=10)
        assert not cert
        assert B.contains_bits(got.bits ^ v)
        exact, cert = coset_min_weight(B, Gf2Vector(m, v))
        assert cert
        assert got.weight >= exact.weight
