import cmath

import pytest
from hypothesis import given, settings, strategies as st

from qtqft import fusion
from qtqft.cyclo import cyc_from_int, cyc_from_power
from qtqft.fusion import IdentityFailure, build_fusion_data

from words import f_D, f_qdim, f_S, f_twist


def close(x, z, tol=1e-10):
    return abs(x.to_complex() - z) < tol


def test_level2_tables():
    fd = build_fusion_data(2)
    sqrt2 = cyc_from_power(4, 32) + cyc_from_power(-4, 32)
    assert fd.order == 32
    assert [fd.qdim(a) for a in fd.labels] == [fd.one, sqrt2, fd.one]
    assert fd.D2 == cyc_from_int(4, 32)
    assert fd.D == cyc_from_int(2, 32)
    half = fd.one / 2
    assert [list(row) for row in fd.S] == [
        [half, sqrt2 * half, half],
        [sqrt2 * half, fd.zero, -sqrt2 * half],
        [half, -sqrt2 * half, half],
    ]
    # conformal weights 0, 3/16, 1/2
    assert fd.twist(1) == cyc_from_power(6, 32)
    assert fd.twist(2) == cyc_from_int(-1, 32)


def test_level1_unknot_dimension():
    fd = build_fusion_data(1)
    assert fd.qdim(1) == fd.one
    assert tuple(fd.fuse(1, 1)) == (0,)


@pytest.mark.parametrize("k", range(1, 7))
def test_tables_match_closed_forms(k):
    fd = build_fusion_data(k)
    assert close(fd.D, f_D(k))
    for a in fd.labels:
        assert close(fd.qdim(a), f_qdim(k, a))
        assert close(fd.twist(a), f_twist(k, a))
        for b in fd.labels:
            assert close(fd.S[a][b], f_S(k, a, b))
    # central charge 3k/(k+2)
    assert close(fd.kappa, cmath.exp(2j * cmath.pi * 3 * k / (8 * (k + 2))))


def test_admissibility():
    fd = build_fusion_data(3)
    assert fd.admissible(1, 1, 0) and fd.admissible(1, 1, 2)
    assert not fd.admissible(1, 1, 1)  # parity
    assert fd.admissible(3, 3, 0) and not fd.admissible(3, 3, 2)
    assert not fd.admissible(2, 3, 3)  # 2 + 3 + 3 > 2k
    with pytest.raises(ValueError):
        fd.check_label(4)


def test_level_guard():
    with pytest.raises(ValueError):
        build_fusion_data(0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_identity_suites(k):
    names = [name for name, n in fusion.identity_suites(build_fusion_data(k)) if n > 0]
    assert names == [name for name, _ in fusion.SUITES]


def test_corrupted_table_is_caught():
    fd = fusion.FusionData(2)
    key = (1, 1, 1, 1, 0, 0)
    fd._fcache[key] = fd.fmove(*key) * 2
    with pytest.raises(IdentityFailure) as e:
        fusion.check_pentagon(fd)
    assert e.value.name == "pentagon"


@pytest.mark.parametrize("k", [2, 3, 4])
def test_monodromy_is_twist_ratio(k):
    fd = build_fusion_data(k)
    for a in fd.labels:
        for b in fd.labels:
            for c in fd.fuse(a, b):
                lam = fd.braid_eigenvalue(a, b, c)
                assert lam * lam == fd.twist(c) / (fd.twist(a) * fd.twist(b))
                assert fd.braid_eigenvalue(a, b, c, -1) == lam.inverse()


@pytest.mark.parametrize("k", [2, 3])
def test_sixj_unitary_square(k):
    fd = build_fusion_data(k)
    L = fd.labels
    for a in L:
        for b in L:
            for c in L:
                for d in L:
                    es = [e for e in L if fd.admissible(a, b, e) and fd.admissible(e, c, d)]
                    fs = [f for f in L if fd.admissible(b, c, f) and fd.admissible(a, f, d)]
                    for e in es:
                        tot = sum((fd.sixj_squared(a, b, c, d, e, f) for f in fs), fd.zero)
                        assert tot == fd.one


levels = st.integers(1, 5)


@settings(max_examples=40, deadline=None)
@given(levels, st.data())
def test_fusion_ring(k, data):
    fd = build_fusion_data(k)
    a, b, c = (data.draw(st.sampled_from(fd.labels)) for _ in range(3))
    assert fd.N(a, b, c) == fd.N(b, a, c) == fd.N(a, c, b)
    # associativity of the fusion ring
    lhs = {}
    for x in fd.fuse(a, b):
        for y in fd.fuse(x, c):
            lhs[y] = lhs.get(y, 0) + 1
    rhs = {}
    for x in fd.fuse(b, c):
        for y in fd.fuse(a, x):
            rhs[y] = rhs.get(y, 0) + 1
    assert lhs == rhs
    dsum = sum((fd.qdim(x) for x in fd.fuse(a, b)), fd.zero)
    assert dsum == fd.qdim(a) * fd.qdim(b)


@settings(max_examples=30, deadline=None)
@given(levels, st.data())
def test_s_matrix_symmetric_and_real(k, data):
    fd = build_fusion_data(k)
    a = data.draw(st.sampled_from(fd.labels))
    b = data.draw(st.sampled_from(fd.labels))
    assert fd.S[a][b] == fd.S[b][a]
    assert fd.S[a][b] == fd.S[a][b].conjugate()
    # Hopf link value [ (a+1)(b+1) ]
    assert fd.S_tilde[a][b] == fd.qint((a + 1) * (b + 1))
