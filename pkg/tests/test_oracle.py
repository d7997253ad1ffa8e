import pytest

from qtqft import oracle
from qtqft.blocks import link_invariant
from qtqft.fusion import build_fusion_data

from words import braid2, kink, unknot


@pytest.mark.parametrize("k", [2, 3, 5])
def test_representation_relations(k):
    fd = build_fusion_data(k)
    for a in range(min(3, k) + 1):
        assert oracle.check_relations(fd, a)


def test_spin_cap():
    fd = build_fusion_data(6)
    with pytest.raises(ValueError):
        oracle.rep_matrices(fd, 4)


@pytest.mark.parametrize("k", [2, 3])
def test_yang_baxter(k):
    fd = build_fusion_data(k)
    for a in (1, 2):
        if a > k:
            continue
        B = oracle.braid_matrix(fd, a, a)
        one = oracle.identity(fd, a + 1)
        B1 = oracle.kron(fd, B, one)
        B2 = oracle.kron(fd, one, B)
        lhs = oracle.matmul(fd, oracle.matmul(fd, B1, B2), B1)
        rhs = oracle.matmul(fd, oracle.matmul(fd, B2, B1), B2)
        assert lhs == rhs


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_braid_eigenvalues_match_fusion(k):
    fd = build_fusion_data(k)
    for a in range(min(3, k) + 1):
        for b in range(min(3, k) + 1):
            eig = oracle.braid_eigen(fd, a, b)
            assert sorted(eig) == sorted(c for c in fd.fuse(a, b))
            for c, v in eig.items():
                assert v == fd.braid_eigenvalue(a, b, c)


def test_highest_weight_vectors_are_annihilated():
    fd = build_fusion_data(3)
    E, _, _ = oracle.coproduct(fd, 1, 2)
    for c in (1, 3):
        v = oracle.highest_weight_vector(fd, 1, 2, c)
        Ev = [sum((E[i][j] * v[j] for j in range(len(v))), fd.zero) for i in range(len(v))]
        assert all(x.is_zero() for x in Ev)


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize("m", range(0, 6))
def test_torus_links_match_bracket(k, m):
    fd = build_fusion_data(k)
    for sign in "+-":
        w = braid2(k, 1, 1, m, sign)
        assert oracle.rt_spin_half(w, fd) == link_invariant(w, fd)


def test_bracket_basics():
    fd = build_fusion_data(2)
    A = fd.xi(2)
    delta = -(A * A) - (A * A).inverse()
    assert oracle.kauffman_bracket(unknot(2, 1), fd) == delta
    # X+ on a freshly born pair is a writhe -1 kink
    assert oracle.kauffman_bracket(kink(2, 1, "+"), fd) == -(A ** -3) * delta
    assert oracle.kauffman_bracket(kink(2, 1, "-"), fd) == -(A ** 3) * delta


def test_bracket_rejects_higher_spin():
    fd = build_fusion_data(2)
    with pytest.raises(ValueError):
        oracle.kauffman_bracket(unknot(2, 2), fd)
