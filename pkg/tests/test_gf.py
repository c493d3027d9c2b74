import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmatroids.gf import (
    Cmp,
    InputError,
    ambient,
    compare,
    contains,
    coordinate_space,
    embedding,
    format_subspace,
    full_space,
    gaussian_binomial,
    grassmannian,
    intersect,
    new_points,
    orthogonal_complement,
    parse_subspace,
    reverse_canonical,
    subspace_sum,
    zero_space,
)

from strategies import row_lists, subspace_pairs


def S(text, q=2):
    return parse_subspace(text, q)


def _span(x):
    vecs = set()
    for coeffs in itertools.product(range(x.q), repeat=x.k):
        v = tuple(sum(c * r[i] for c, r in zip(coeffs, x.rows)) % x.q for i in range(x.n))
        vecs.add(v)
    return vecs


def _rank(rows, q):
    return reverse_canonical(rows, q, len(rows[0])).k if rows else 0


class TestReverseCanonical:
    def test_mixed_rows(self):
        assert format_subspace(reverse_canonical([[0, 1, 0, 0], [1, 1, 1, 0]], 2)) == "0100;1010"

    def test_already_canonical(self):
        assert format_subspace(reverse_canonical([[1, 0, 0, 0], [0, 1, 0, 0]], 2)) == "1000;0100"

    def test_scales_trailing_entry(self):
        assert reverse_canonical([[1, 2, 0]], 3).rows == ((2, 1, 0),)

    def test_dependent_rows_collapse(self):
        x = reverse_canonical([[1, 1, 0], [0, 1, 1], [1, 0, 1]], 2)
        assert x.k == 2

    @pytest.mark.parametrize("rows", [[[1, 2]], [[1, 0], [1]], [[0.5, 1]]])
    def test_rejects_bad_entries(self, rows):
        with pytest.raises(InputError):
            reverse_canonical(rows, 2)

    def test_rejects_composite_field(self):
        with pytest.raises(InputError):
            reverse_canonical([[1, 0]], 4)

    @given(row_lists())
    def test_idempotent_and_same_span(self, data):
        q, n, rows = data
        x = reverse_canonical(rows, q, n)
        assert reverse_canonical([list(r) for r in x.rows], q, n) == x
        assert _span(x) == _span(type(x)(q, n, tuple(tuple(r) for r in rows)))

    @given(row_lists())
    def test_normal_form_shape(self, data):
        q, n, rows = data
        x = reverse_canonical(rows, q, n)
        pivots = [max(i for i, c in enumerate(r) if c) for r in x.rows]
        assert pivots == sorted(set(pivots))
        for r, p in zip(x.rows, pivots):
            assert r[p] == 1
            assert sum(1 for other in x.rows if other[p]) == 1


class TestOrder:
    def test_first_seven_planes_of_f2_4(self):
        got = [format_subspace(x) for x in grassmannian(4, 2, 2)[:7]]
        assert got == [
            "1000;0100",
            "1000;0010",
            "0100;0010",
            "1100;0010",
            "0100;1010",
            "1100;1010",
            "1000;0110",
        ]

    def test_compare(self):
        assert compare(S("1000;0100"), S("1000;0010")) is Cmp.LT
        assert compare(S("1100;1010"), S("1000;0110")) is Cmp.LT
        assert compare(S("1000;0010"), S("1000;0010")) is Cmp.EQ
        assert compare(S("1000;0110"), S("1100;1010")) is Cmp.GT

    def test_dimension_first(self):
        assert compare(S("0001"), S("1000;0100")) is Cmp.LT

    def test_mismatch(self):
        with pytest.raises(InputError):
            compare(S("100"), S("1000"))

    @pytest.mark.parametrize("q,n", [(2, 4), (3, 3), (2, 5), (5, 2)])
    def test_grassmannian_sizes_and_order(self, q, n):
        for k in range(n + 1):
            g = grassmannian(n, k, q)
            assert len(g) == gaussian_binomial(n, k, q)
            assert all(a < b for a, b in zip(g, g[1:]))

    @pytest.mark.parametrize("q,n", [(2, 4), (3, 3)])
    def test_prefix_property(self, q, n):
        for m in range(n + 1):
            U = coordinate_space(m, n, q)
            for k in range(n + 1):
                inside = [contains(U, x) for x in grassmannian(n, k, q)]
                cut = sum(inside)
                assert all(inside[:cut]) and not any(inside[cut:])


class TestGaussian:
    @pytest.mark.parametrize("n,k,q,val", [(4, 2, 2, 35), (5, 2, 2, 155), (4, 2, 3, 130), (3, 1, 3, 13), (0, 0, 2, 1)])
    def test_values(self, n, k, q, val):
        assert gaussian_binomial(n, k, q) == val

    @pytest.mark.parametrize("q,n", [(2, 3), (2, 4), (3, 3)])
    def test_brute_force(self, q, n):
        vecs = list(itertools.product(range(q), repeat=n))
        for k in range(n + 1):
            spans = set()
            for rows in itertools.combinations(vecs, k):
                if _rank([list(r) for r in rows], q) == k:
                    spans.add(reverse_canonical([list(r) for r in rows], q, n) if k else zero_space(n, q))
            assert len(spans) == gaussian_binomial(n, k, q)


class TestLattice:
    def test_complement_example(self):
        x = reverse_canonical([[1, 1, 0]], 3)
        assert format_subspace(orthogonal_complement(x)) == "210;001"

    def test_intersection_example(self):
        a, b = S("10000;01000;00001"), S("00100;00010;00001")
        assert format_subspace(intersect(a, b)) == "00001"

    @given(subspace_pairs())
    def test_dimension_formula(self, pair):
        a, b = pair
        assert subspace_sum(a, b).k + intersect(a, b).k == a.k + b.k

    @given(subspace_pairs())
    def test_meet_and_join_by_vectors(self, pair):
        a, b = pair
        assert _span(intersect(a, b)) == _span(a) & _span(b)
        assert _span(a) | _span(b) <= _span(subspace_sum(a, b))
        assert contains(subspace_sum(a, b), a) and contains(a, intersect(a, b))

    @given(row_lists())
    def test_perp_involution(self, data):
        q, n, rows = data
        x = reverse_canonical(rows, q, n)
        p = orthogonal_complement(x)
        assert p.k == n - x.k
        assert orthogonal_complement(p) == x
        for u in x.rows:
            for v in p.rows:
                assert sum(a * b for a, b in zip(u, v)) % q == 0

    def test_new_points(self):
        pts = new_points(2, 3)
        assert len(pts) == 9
        assert all(p.rows[0][-1] == 1 for p in pts)
        assert pts == sorted(pts)


class TestText:
    def test_roundtrip(self):
        for x in grassmannian(3, 2, 3):
            assert parse_subspace(format_subspace(x), 3) == x

    def test_zero(self):
        assert parse_subspace("0000", 2) == zero_space(4, 2)
        assert format_subspace(zero_space(3, 2)) == "000"

    def test_bad_syntax(self):
        with pytest.raises(InputError):
            parse_subspace("10a", 2)
        with pytest.raises(InputError):
            parse_subspace("102", 2)
        with pytest.raises(InputError):
            parse_subspace("10;1", 2)


class TestAmbient:
    @pytest.mark.parametrize("q,n", [(2, 3), (3, 2), (2, 4)])
    def test_tables_agree_with_operations(self, q, n):
        A = ambient(q, n)
        rng = np.random.default_rng(1)
        for _ in range(200):
            i, j = (int(v) for v in rng.integers(0, A.N, 2))
            a, b = A[i], A[j]
            assert A[int(A.sum[i, j])] == subspace_sum(a, b)
            assert A[int(A.meet[i, j])] == intersect(a, b)
            assert bool(A.leq[i, j]) == contains(b, a)
            assert A[int(A.perp[i])] == orthogonal_complement(a)

    def test_index_roundtrip(self):
        A = ambient(3, 3)
        assert all(A.index(x) == i for i, x in enumerate(A.subspaces))
        assert A[A.top] == full_space(3, 3) and A[0] == zero_space(3, 3)

    def test_pointsets_match_vectors(self):
        A = ambient(2, 4)
        for i in range(A.N):
            assert bin(A.pointsets[i]).count("1") == (2 ** A.dims[i] - 1)
            assert A.index_of_pointset(A.pointsets[i]) == i

    def test_embedding_is_coordinate_inclusion(self):
        small, big = ambient(2, 3), ambient(2, 4)
        emb = embedding(small, big)
        for i, x in enumerate(small.subspaces):
            assert big[int(emb[i])].rows == tuple(r + (0,) for r in x.rows)

    @given(st.sampled_from([(2, 3), (3, 2), (2, 2)]), st.data())
    def test_join_table(self, qn, data):
        q, n = qn
        A = ambient(q, n)
        i = data.draw(st.integers(0, A.N - 1))
        v = data.draw(st.integers(0, A.size - 1))
        expect = subspace_sum(A[i], reverse_canonical([list(A.digits[v])], q, n)) if v else A[i]
        assert A[int(A.join[i, v])] == expect
