import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmatroids.gf import ambient, parse_subspace, subspace_sum
from qmatroids.oracle import all_qmatroids
from qmatroids.qmatroid import (
    Encoding,
    FlatFamily,
    QMatroid,
    ValidationError,
    bases,
    check_rank_axioms,
    closure,
    decode,
    dual,
    dumps,
    encode,
    flats,
    free,
    from_flats,
    from_rank_table,
    is_modular_pair,
    loads,
    read_matroid,
    restriction,
    uniform,
    write_matroid,
)

SMALL = [(2, 2), (2, 3), (3, 2), (3, 3)]


@pytest.fixture(scope="module")
def every_small():
    return {qn: all_qmatroids(*qn) for qn in SMALL}


def S(text, q=2):
    return parse_subspace(text, q)


class TestRankTables:
    def test_uniform_accepted(self):
        A = ambient(2, 3)
        M = from_rank_table(2, 3, np.minimum(A.dims, 1))
        assert M == uniform(1, 3, 2)

    def test_free(self):
        M = free(3, 2)
        assert np.array_equal(M.rank, M.ambient.dims)

    def test_r3_violation_reported(self):
        A = ambient(2, 2)
        rank = np.zeros(A.N, dtype=int)
        rank[A.top] = 2
        with pytest.raises(ValidationError) as err:
            from_rank_table(2, 2, rank)
        assert err.value.axiom == "R3"
        assert len(err.value.witnesses) == 2

    def test_r1_and_r2(self):
        A = ambient(2, 2)
        with pytest.raises(ValidationError) as err:
            from_rank_table(2, 2, A.dims + 1)
        assert err.value.axiom == "R1"
        rank = np.minimum(A.dims, 1)
        rank[A.top] = 0
        with pytest.raises(ValidationError) as err:
            from_rank_table(2, 2, rank)
        assert err.value.axiom == "R2"

    def test_wrong_length(self):
        with pytest.raises(Exception):
            from_rank_table(2, 2, [0, 1])


class TestEncoding:
    def test_uniform_all_ones(self):
        enc = uniform(2, 4, 2).encoding()
        assert enc.bits == "1" * 35

    def test_rank_zero(self):
        assert uniform(0, 3, 2).encoding().bits == "1"

    def test_length_checked(self):
        with pytest.raises(Exception):
            Encoding(2, 4, 2, "1" * 34)

    def test_decode_roundtrip(self, every_small):
        for ms in every_small.values():
            for M in ms:
                enc = encode(M)
                assert decode(enc.q, enc.n, enc.k, enc) == M

    def test_decode_rejects_empty(self):
        with pytest.raises(ValidationError):
            decode(2, 3, 1, "0000000")

    def test_decode_rejects_non_basis_family(self):
        # a single basis of a 2-dim space in F_2^4 does not define a q-matroid
        bits = "1" + "0" * 34
        with pytest.raises(ValidationError):
            decode(2, 4, 2, bits)

    def test_bases(self):
        M = uniform(1, 2, 2)
        assert [str(b) for b in bases(M)] == ["10", "01", "11"]

    def test_file_roundtrip(self, tmp_path):
        M = uniform(2, 4, 3)
        write_matroid(M, tmp_path / "m.qm")
        assert read_matroid(tmp_path / "m.qm") == M
        assert loads(dumps(M)) == M.encoding()


class TestClosureAndFlats:
    def test_closure_axioms_brute_force(self, every_small):
        for ms in every_small.values():
            for M in ms:
                A = M.ambient
                cl = M.closure_table
                assert np.all(A.leq[np.arange(A.N), cl])  # CL1
                assert np.array_equal(cl[cl], cl)  # CL3
                assert np.array_equal(M.rank[cl], M.rank)
                i, j = np.nonzero(A.leq)
                assert np.all(A.leq[cl[i], cl[j]])  # CL2

    def test_exchange_cl4(self, every_small):
        for ms in every_small.values():
            for M in ms:
                A = M.ambient
                cl = M.closure_table
                pts = list(A.points())
                for x in range(A.N):
                    for y in pts:
                        xy = int(A.sum[x, y])
                        for z in pts:
                            if A.leq[z, cl[xy]] and not A.leq[z, cl[x]]:
                                assert A.leq[y, cl[int(A.sum[x, z])]]

    def test_flat_axioms(self, every_small):
        for ms in every_small.values():
            for M in ms:
                flats(M).check_axioms()

    def test_flats_of_uniform(self):
        F = flats(uniform(1, 3, 2))
        assert [str(f) for f in F.reps()] == ["000", "100;010;001"]

    def test_closure_function(self):
        M = uniform(2, 3, 2)
        assert closure(M, S("100;010")).k == 3
        assert closure(M, S("100")) == S("100")

    def test_bad_family_rejected(self):
        A = ambient(2, 3)
        with pytest.raises(ValidationError):
            FlatFamily(A, [0, 1, A.top]).check_axioms()  # F3 fails: point e not covered uniquely

    def test_from_flats_roundtrip(self, every_small):
        for ms in every_small.values():
            for M in ms:
                assert from_flats(M.q, M.n, flats(M).indices) == M

    def test_spread_family(self):
        lines = ["1000;0100", "0010;0001", "1010;0101", "1001;0111", "1011;0110"]
        A = ambient(2, 4)
        fam = [A[0]] + [S(t) for t in lines] + [A[A.top]]
        M = from_flats(2, 4, fam)
        assert M.k == 2
        assert M.r(S("1000;0100")) == 1
        assert M.r(S("1000;0010")) == 2


class TestDualRestriction:
    def test_dual_uniform(self):
        assert dual(uniform(2, 5, 2)) == uniform(3, 5, 2)

    def test_dual_involution(self, every_small):
        for ms in every_small.values():
            for M in ms:
                D = dual(M)
                check_rank_axioms(D.ambient, D.rank)
                assert D.k == M.n - M.k
                assert dual(D) == M

    def test_restriction_of_uniform(self):
        R = restriction(uniform(1, 3, 2), S("100;011"))
        assert R == uniform(1, 2, 2)
        assert [str(f) for f in flats(R).reps()] == ["00", "10;01"]

    def test_restriction_to_coordinate_space(self, every_small):
        for M in every_small[(2, 3)]:
            R = restriction(M, S("100;010"))
            A = R.ambient
            for i in range(A.N):
                x = A[i]
                big = parse_subspace(";".join(r + "0" for r in str(x).split(";")) if x.k else "000", 2)
                assert R.rank[i] == M.r(big)


class TestModularPairs:
    def test_uniform_lines(self):
        M = uniform(2, 3, 2)
        assert is_modular_pair(M, S("100"), S("010"))
        assert not is_modular_pair(M, S("000"), S("100;010;001")) is False

    def test_non_flat_rejected(self):
        with pytest.raises(Exception):
            is_modular_pair(uniform(1, 3, 2), S("100"), S("010"))


@given(st.sampled_from(SMALL), st.data())
def test_random_rank_table_validation_agrees(qn, data):
    """Perturbing one entry of a valid table is caught iff the axioms fail."""
    q, n = qn
    ms = all_qmatroids(q, n)
    M = data.draw(st.sampled_from(ms))
    A = M.ambient
    i = data.draw(st.integers(1, A.N - 1))
    rank = M.rank.astype(int).copy()
    rank[i] = data.draw(st.integers(0, n))
    valid = any(np.array_equal(rank, other.rank) for other in ms)
    try:
        QMatroid(A, rank)
        accepted = True
    except ValidationError:
        accepted = False
    assert accepted == valid


@given(st.sampled_from(SMALL), st.data())
def test_submodularity_of_closure_rank(qn, data):
    M = data.draw(st.sampled_from(all_qmatroids(*qn)))
    A = M.ambient
    x, y = (data.draw(st.integers(0, A.N - 1)) for _ in range(2))
    assert M.r(subspace_sum(A[x], A[y])) <= M.r(A[x]) + M.r(A[y])
