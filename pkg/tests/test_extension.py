import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qmatroids import kernels
from qmatroids.extension import (
    count_selectors,
    extend,
    extension_rank,
    is_modular_cut,
    lower_restriction,
    make_cut,
    minimal_members,
    modular_cuts,
    satisfies_qm,
    selector_of,
    selectors,
    trivial_extension,
    trivial_selector,
)
from qmatroids.gf import InputError, ambient, embedding, parse_subspace
from qmatroids.group import canonical_form, is_canonical
from qmatroids.oracle import all_qmatroids
from qmatroids.qmatroid import QMatroid, check_rank_axioms, flats, free, restriction, uniform


def S(text, q=2):
    return parse_subspace(text, q)


def _brute_cuts(M):
    """Every up-closed, (M2)-closed family of flats, by subset enumeration."""
    F = flats(M)
    A = M.ambient
    idx = F.indices
    out = []
    for mask in range(1 << len(idx)):
        mem = [i for i in range(len(idx)) if mask >> i & 1]
        ok = all(mask >> j & 1 for i in mem for j in range(len(idx)) if F.leq[i, j])
        if ok:
            for a in mem:
                for b in mem:
                    s, m = int(A.sum[idx[a], idx[b]]), int(A.meet[idx[a], idx[b]])
                    if M.rank[s] + M.rank[m] == M.rank[idx[a]] + M.rank[idx[b]] and not mask >> F.pos[m] & 1:
                        ok = False
        if ok:
            out.append(mask)
    return sorted(out)


class TestModularCuts:
    def test_restricted_uniform_example(self):
        R = restriction(uniform(1, 3, 2), S("100;011"))
        cuts = modular_cuts(R)
        assert len(cuts) == 3
        assert {tuple(str(f) for f in c.flats()) for c in cuts} == {(), ("10;01",), ("00", "10;01")}

    def test_counts(self):
        assert len(modular_cuts(free(2, 2))) == 6
        assert len(modular_cuts(uniform(0, 3, 2))) == 2
        assert len(modular_cuts(uniform(3, 4, 2), max_flats=200)) == 1229

    def test_guard(self):
        with pytest.raises(InputError):
            modular_cuts(free(4, 2))

    def test_against_subset_enumeration(self):
        for q, n in [(2, 2), (2, 3), (3, 2)]:
            for M in all_qmatroids(q, n):
                if len(flats(M)) > 16:
                    continue
                assert sorted(c.members for c in modular_cuts(M)) == _brute_cuts(M)

    def test_empty_and_full_present(self):
        for M in all_qmatroids(2, 3):
            masks = {c.members for c in modular_cuts(M)}
            assert 0 in masks and (1 << len(flats(M))) - 1 in masks

    def test_minimal_members_generate(self):
        M = uniform(2, 3, 2)
        for c in modular_cuts(M):
            mins = minimal_members(c)
            A = M.ambient
            up = {int(f) for f in flats(M).indices for m in mins if A.leq[A.index(m), f]}
            assert up == {A.index(f) for f in c.flats()}

    def test_is_modular_cut(self):
        M = uniform(2, 3, 2)
        E = S("100;010;001")
        assert is_modular_cut(M, [E])
        assert is_modular_cut(M, [S("100"), E])
        # two points form a modular pair whose meet is missing
        assert not is_modular_cut(M, [S("100"), S("010"), E])
        assert not is_modular_cut(M, [S("100")])  # not up-closed
        with pytest.raises(InputError):
            make_cut(uniform(1, 3, 2), [S("100")])


class TestSelectors:
    def test_selector_of_uniform(self):
        sel = selector_of(uniform(1, 3, 2))
        assert len(sel.values) == 4
        for w in range(4):
            assert [str(f) for f in sel.cut(w).flats()] == ["10;01"]

    def test_example_roundtrip(self):
        M = uniform(1, 2, 2)
        sels = list(selectors(M))
        assert len(sels) == 6
        for s in sels:
            N = extend(M, s, validate=True)
            assert selector_of(N).values == s.values
            assert lower_restriction(N) == M

    def test_all_satisfy_qm(self):
        for M in all_qmatroids(2, 3):
            for s in selectors(M):
                assert satisfies_qm(M, s.values)

    def test_trivial_or_contains_ambient(self):
        for M in all_qmatroids(2, 3):
            top = 1 << (len(flats(M)) - 1)
            for s in selectors(M):
                inside = [bool(v & top) for v in s.values]
                assert all(inside) or s.is_trivial()

    def test_count_matches_listing(self):
        for M in all_qmatroids(3, 2):
            assert count_selectors(M) == sum(1 for _ in selectors(M))

    def test_first_point_partition(self):
        M = uniform(1, 3, 2)
        cuts = modular_cuts(M)
        parts = [list(selectors(M, cuts, first=i)) for i in range(len(cuts))]
        whole = list(selectors(M, cuts))
        assert [s.values for p in parts for s in p] == [s.values for s in whole]


class TestExtend:
    def test_trivial_extension(self):
        M = uniform(1, 2, 2)
        N = trivial_extension(M)
        assert N.k == 2
        assert extend(M, trivial_selector(M)) == N

    def test_restriction_is_parent(self):
        for M in all_qmatroids(2, 2) + all_qmatroids(3, 2):
            emb = embedding(M.ambient, ambient(M.q, M.n + 1))
            for s in selectors(M):
                N = extend(M, s)
                check_rank_axioms(N.ambient, N.rank)
                assert np.array_equal(N.rank[emb], M.rank)

    def test_well_defined_on_equal_sums(self):
        M = uniform(1, 2, 3)
        big = ambient(3, 3)
        base = 9
        for s in selectors(M):
            N = extend(M, s)
            for x in ambient(3, 2).subspaces:
                xi = int(embedding(M.ambient, big)[ambient(3, 2).index(x)])
                groups = {}
                for w in range(base):
                    groups.setdefault(int(big.join[xi, base + w]), set()).add(int(N.rank[big.join[xi, base + w]]))
                assert all(len(v) == 1 for v in groups.values())

    def test_wrong_length(self):
        with pytest.raises(InputError):
            extend(uniform(1, 2, 2), (0, 0))


class TestKernel:
    def test_canonical_mode_matches_python_filter(self):
        for M in [m for m in all_qmatroids(2, 3) if is_canonical(m)]:
            from qmatroids.extension import search

            cuts = modular_cuts(M)
            masks = [c.members for c in cuts]
            _, rows = search(M, kernels.LEAF_CANONICAL, cuts, skip_trivial=True)
            got = sorted(extend(M, tuple(masks[c] for c in r)).encoding().bits for r in rows)
            want = sorted(
                extend(M, s).encoding().bits
                for s in selectors(M, cuts)
                if not s.is_trivial() and is_canonical(extend(M, s))
            )
            assert got == want

    def test_too_many_cuts(self):
        from qmatroids.extension import search

        with pytest.raises(InputError):
            search(uniform(3, 4, 2), kernels.LEAF_COUNT, modular_cuts(uniform(3, 4, 2), max_flats=200))


@given(st.sampled_from([(2, 2), (3, 2), (2, 3)]), st.data())
def test_extension_rank_axioms(qn, data):
    M = data.draw(st.sampled_from(all_qmatroids(*qn)))
    sels = list(selectors(M))
    s = data.draw(st.sampled_from(sels))
    N = QMatroid(ambient(M.q, M.n + 1), extension_rank(M, s.values))
    assert N.k in (M.k, M.k + 1)
    assert (N.k == M.k + 1) == s.is_trivial()
