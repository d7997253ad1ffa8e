from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from qtqft import threemfld as M
from qtqft.blocks import MorseWordError, trace_word
from qtqft.fusion import build_fusion_data

from words import f_D, f_lens, framed_unknot_text


def surgery(text, fd):
    return M.surgery_invariant(M.parse_surgery(text), fd)


HOPF = "cup\nbirth(2,1,1)\nbirth(4,2,1)\nX+(4,1)\nX+(4,1)\ndeath(4,2)\ndeath(2,1)\ncap\n"
TREFOIL = "cup\nbirth(2,1,1)\nbirth(4,2,1)\nX+(4,1)\nX+(4,1)\nX+(4,1)\ndeath(4,2)\ndeath(2,1)\ncap\n"
U = "cup\nbirth(2,1,1)\ndeath(2,1)\ncap\n"


def link_text(k, body, framings):
    return f"qtqft-format 1\nlevel {k}\n{body}framings {','.join(map(str, framings))}\n"


# signature

@pytest.mark.parametrize(
    "m, sig",
    [([[0, 1], [1, 0]], 0), ([[2, 1], [1, 2]], 2), ([[0, 0], [0, -1]], -1), ([[-2, 1, 0], [1, -2, 1], [0, 1, -2]], -3), ([], 0)],
)
def test_signature(m, sig):
    assert M.signature(m) == sig


def test_signature_rejects_asymmetric():
    with pytest.raises(ValueError):
        M.signature([[0, 1], [0, 0]])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=6, max_size=6), st.lists(st.integers(-2, 2), min_size=3, max_size=3))
def test_signature_congruence_invariant(vals, shear):
    a, b, c, d, e, f = vals
    A = [[a, b, c], [b, d, e], [c, e, f]]
    x, y, z = shear
    P = [[1, x, y], [0, 1, z], [0, 0, 1]]  # unimodular
    PA = [[sum(P[i][t] * A[t][j] for t in range(3)) for j in range(3)] for i in range(3)]
    B = [[sum(PA[i][t] * P[j][t] for t in range(3)) for j in range(3)] for i in range(3)]
    assert M.signature(A) == M.signature(B)
    assert M.signature([[-v for v in row] for row in A]) == -M.signature(A)


# surgery

@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_surgery_normalization(k):
    fd = build_fusion_data(k)
    assert M.surgery_invariant(M.FramedSurgeryLink(M.MorseWord(k, []), ()), fd) == fd.one
    assert surgery(framed_unknot_text(k, 1), fd) == fd.one
    assert surgery(framed_unknot_text(k, -1), fd) == fd.one
    assert surgery(framed_unknot_text(k, 0), fd) == fd.D
    both = link_text(k, "cup\nbirth(2,1,1)\ndeath(2,1)\ncap\n" * 2, (1, -1))
    assert surgery(both, fd) == fd.one


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("p", range(-5, 6))
def test_lens_spaces_three_routes(k, p):
    fd = build_fusion_data(k)
    s = surgery(framed_unknot_text(k, p), fd)
    assert s == M.modular_value(fd, ["S", f"T^{p}", "S"])
    assert abs(s.to_complex() - f_lens(k, p)) < 1e-9


def test_lens_frozen_values():
    # L(3,1) at k = 3 in Q(exp(2 pi i / 40)); L(2,1) at k = 2 is 2 sin(pi/8)-ish real
    fd = build_fusion_data(3)
    assert str(surgery(framed_unknot_text(3, 3), fd)) == "1*z^2 + 1*z^10 - 1*z^14"
    fd2 = build_fusion_data(2)
    v = surgery(framed_unknot_text(2, 2), fd2)
    assert v == v.conjugate() and abs(v.to_complex() - 0.7653668647301796) < 1e-12


@pytest.mark.parametrize("k", [2, 3])
@pytest.mark.parametrize(
    "body, framings",
    [(HOPF, (0, 0)), (HOPF, (1, -2)), (HOPF, (3, 1)), (TREFOIL, (1,)), (TREFOIL, (-1,)), (TREFOIL, (5,))],
)
def test_kirby_one_and_orientation(k, body, framings):
    fd = build_fusion_data(k)
    base = surgery(link_text(k, body, framings), fd)
    for e in (1, -1):
        assert surgery(link_text(k, body + U, framings + (e,)), fd) == base
    mirrored = M.parse_surgery(link_text(k, body, framings)).mirror()
    assert M.surgery_invariant(mirrored, fd) == base.conjugate()


def test_hopf_zero_framing_is_sphere():
    # the 0-framed Hopf link describes S^3
    for k in (2, 3):
        fd = build_fusion_data(k)
        assert surgery(link_text(k, HOPF, (0, 0)), fd) == fd.one


def test_parallel_threads_agree():
    fd = build_fusion_data(3)
    L = M.parse_surgery(link_text(3, HOPF + U, (2, 1, -3)))
    assert M.surgery_invariant(L, fd, threads=1) == M.surgery_invariant(L, fd, threads=4)


def test_surgery_needs_framings():
    with pytest.raises(MorseWordError):
        M.parse_surgery("qtqft-format 1\nlevel 2\n" + U)
    with pytest.raises(MorseWordError):
        M.parse_surgery(link_text(2, U, (1, 2)))


# genus one

@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_modular_words(k):
    fd = build_fusion_data(k)
    assert M.modular_value(fd, ["S"]) == fd.one
    assert M.modular_value(fd, []) == fd.D
    assert M.modular_value(fd, ["T^4"]) == fd.D
    assert M.modular_value(fd, ["T^2", "S", "T^-1"]) == fd.one
    assert abs(fd.D.to_complex() - f_D(k)) < 1e-12


def test_heegaard_parse():
    level, d = M.parse_heegaard("qtqft-format 1\nlevel 2\ngenus 2\nword twist(a1) twist(c1)^-2 twist(b2)\n")
    assert level == 2 and d.genus == 2 and not d.modular
    assert d.word == [("a", 0, 1), ("c", 0, -2), ("b", 1, 1)]
    level, d = M.parse_heegaard("level 3\ngenus 1\nword S T^3 S\n")
    assert d.modular and d.word == ["S", "T^3", "S"]
    with pytest.raises(MorseWordError):
        M.parse_heegaard("level 2\ngenus 2\nword S T\n")
    with pytest.raises(MorseWordError):
        M.parse_heegaard("level 2\ngenus 2\nword twist(q1)\n")
    with pytest.raises(MorseWordError):
        M.parse_heegaard("level 2\nword S\n")


def test_modular_to_twists():
    assert M.modular_to_twists(["S"]) == []
    assert M.modular_to_twists(["S", "T^3", "S"]) == [("a", 0, -1), ("b", 0, -1), ("a", 0, 2)]
    assert M.reduce_twists([("a", 0, 1), ("a", 0, -1), ("b", 0, 2)]) == [("b", 0, 2)]


# curves and the sweep

def test_surface_framings_vanish_on_standard_curves():
    h, eta = Fraction(1, 8), Fraction(1, 32)
    for kind, i in (("a", 0), ("b", 1), ("c", 0), ("e", 0)):
        P = M.standard_curve(kind, i, h, 2)
        assert M.linking_number(P, M.standard_curve(kind, i, h + eta, 2)) == 0


def test_linking_depends_on_height_order():
    lo, hi = Fraction(1, 8), Fraction(3, 8)
    a_lo, a_hi = M.standard_curve("a", 0, lo, 1), M.standard_curve("a", 0, hi, 1)
    b_lo, b_hi = M.standard_curve("b", 0, lo, 1), M.standard_curve("b", 0, hi, 1)
    assert M.linking_number(a_lo, b_hi) == 0
    assert abs(M.linking_number(a_hi, b_lo)) == 1


def test_standard_curve_range():
    with pytest.raises(ValueError):
        M.standard_curve("c", 1, Fraction(1, 8), 2)


curve = st.tuples(st.sampled_from("abce"), st.integers(0, 1))


@settings(max_examples=25, deadline=None)
@given(st.lists(curve, min_size=2, max_size=3, unique=True))
def test_sweep_linking_matches_projection(curves):
    polys = [M.standard_curve(kind, i, Fraction(2 * j + 1, 16), 3) for j, (kind, i) in enumerate(curves)]
    w, order = M.polygons_to_word(polys, 1, [1] * len(polys))
    tr = trace_word(w)
    assert tr.n_components == len(polys) and sorted(order) == list(range(len(polys)))
    lk = tr.linking_matrix([0] * len(polys))
    n = len(polys)
    direct = {(x, y): M.linking_number(polys[order[x]], polys[order[y]]) for x, y in combinations(range(n), 2)}
    # equal up to the orientation each route picks for each curve
    assert any(
        all(lk[x][y] == sg[x] * sg[y] * v for (x, y), v in direct.items())
        for sg in product((1, -1), repeat=n)
    )


# Heegaard twist words and Singer moves

@pytest.mark.parametrize("k", [1, 2])
@pytest.mark.parametrize("w", [["S"], ["S", "T", "S"], ["S", "T^3", "S"], ["S", "T^-2", "S"], ["S", "T^2", "S", "T^-1", "S"]])
def test_stabilization_from_genus_one(k, w):
    fd = build_fusion_data(k)
    before, after = M.singer_move_check(M.HeegaardDiagram(1, w, modular=True), M.SingerMove("stabilization"), fd)
    assert before == after


GENUS2 = [
    [("a", 0, 1)],
    [("c", 0, 1), ("a", 1, -1)],
    [("a", 0, 1), ("b", 1, 1), ("c", 0, -1)],
    [("b", 0, 1), ("c", 0, 1), ("a", 1, 2)],
]


@pytest.mark.parametrize("tw", GENUS2)
@pytest.mark.parametrize("kind", ["composition", "inversion", "stabilization"])
def test_singer_moves_genus_two(tw, kind):
    fd = build_fusion_data(2)
    before, after = M.singer_move_check(M.HeegaardDiagram(2, tw), M.SingerMove(kind), fd)
    assert before == after


def test_singer_move_errors():
    fd = build_fusion_data(1)
    with pytest.raises(ValueError):
        M.singer_move_check(M.HeegaardDiagram(1, ["S"], modular=True), M.SingerMove("composition"), fd)
    with pytest.raises(ValueError):
        M.singer_move_check(M.HeegaardDiagram(2, [("a", 0, 1)]), M.SingerMove("inversion", 5), fd)
    with pytest.raises(ValueError):
        M.singer_move_check(M.HeegaardDiagram(2, []), M.SingerMove("flip"), fd)


def test_genus_two_twist_values():
    fd = build_fusion_data(2)
    # a single twist extends over a handlebody: S^3
    assert M.heegaard_invariant(M.HeegaardDiagram(2, [("c", 0, 1)]), fd) == fd.one
    # tau_a^-1 tau_b^-1 tau_a^2 on handle 1 is L(3,1)
    d = M.HeegaardDiagram(2, [("a", 0, -1), ("b", 0, -1), ("a", 0, 2)])
    assert M.heegaard_invariant(d, fd) == M.modular_value(fd, ["S", "T^3", "S"])


# triangulations

def boundary_4simplex():
    return list(combinations(range(5), 4))


def stellar(tets, t, new):
    rest = [x for x in tets if x != t]
    return rest + [tuple(sorted(set(t) - {v} | {new})) for v in t]


def s2_times_s1(n=3):
    tets = []
    for i in range(n):
        j = (i + 1) % n
        for a, b, c in combinations(range(4), 3):
            v = lambda x, layer: 4 * layer + x
            tets += [
                (v(a, i), v(b, i), v(c, i), v(a, j)),
                (v(b, i), v(c, i), v(a, j), v(b, j)),
                (v(c, i), v(a, j), v(b, j), v(c, j)),
            ]
    return tets


def test_thickening_counts():
    K = M.SimplicialComplex3(boundary_4simplex())
    th = M.canonical_thickening(K)
    assert (len(K.vertices), len(K.edges), len(K.faces), len(K.tets)) == (5, 10, 10, 5)
    assert th.genus == 6 == 1 + len(K.edges) - len(K.vertices)
    assert (th.n_vertices, th.n_edges, th.n_faces) == (30, 60, 20)
    assert th.euler == 2 - 2 * th.genus
    assert all(len(c) == 3 for c in th.meridians_dual.values())
    assert all(len(c) == 3 for c in th.meridians_primal.values())


@pytest.mark.parametrize("k", [1, 2])
def test_sphere_triangulations(k):
    fd = build_fusion_data(k)
    tets = boundary_4simplex()
    assert M.triangulation_invariant(M.SimplicialComplex3(tets), fd) == fd.one
    assert M.triangulation_invariant(M.SimplicialComplex3(stellar(tets, tets[0], 5)), fd) == fd.one


def test_s2_times_s1_triangulation():
    fd = build_fusion_data(1)
    K = M.SimplicialComplex3(s2_times_s1())
    assert M.canonical_thickening(K).genus == 37
    assert M.triangulation_invariant(K, fd) == fd.D2


def test_triangulation_validation():
    with pytest.raises(MorseWordError, match="not closed"):
        M.SimplicialComplex3(boundary_4simplex()[:4])
    with pytest.raises(MorseWordError, match="four distinct"):
        M.SimplicialComplex3([(0, 0, 1, 2)])
    with pytest.raises(MorseWordError, match="not tetravalent"):
        M.SimplicialComplex3(boundary_4simplex() + [(0, 1, 2, 9), (0, 1, 9, 8)])
    two = boundary_4simplex() + [tuple(x + 10 for x in t) for t in boundary_4simplex()]
    with pytest.raises(MorseWordError, match="not connected"):
        M.SimplicialComplex3(two)


def test_triangulation_parse():
    text = "qtqft-format 1\nlevel 2\n" + "".join(f"tet {' '.join(map(str, t))}\n" for t in boundary_4simplex())
    K = M.parse_triangulation(text)
    assert K.level == 2 and len(K.tets) == 5
    with pytest.raises(MorseWordError) as e:
        M.parse_triangulation("tet 0 1 2\n")
    assert e.value.line == 1
    with pytest.raises(MorseWordError) as e:
        M.parse_triangulation("tet 0 1 2 3\ntet 0 1 2 4\n")
    assert e.value.line == 1 and "free" in e.value.msg
