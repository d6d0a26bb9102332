import math

import pytest

import ttm.intervals as ia
from ttm.errors import PreconditionError
from ttm.graphs import make_turn, rose
from ttm.maps import GraphMap, matmul, power
from ttm.towers import (
    StationaryTower, VectorTower, image_vector_tower, repetition_bound,
    tower_self_morphism, weight_tower_from_vector,
)

from conftest import A, Abar, B, Bbar

PHI = (1 + math.sqrt(5)) / 2


def test_preconditions(rose2):
    not_tt = GraphMap(rose2, rose2, [0], [(A, B), (Abar,)])
    with pytest.raises(PreconditionError):
        StationaryTower(not_tt)
    not_exp = GraphMap(rose2, rose2, [0], [(A, B), (B,)])
    with pytest.raises(PreconditionError):
        StationaryTower(not_exp)
    valence2 = GraphMap(rose(1, ("a",)), rose(1, ("a",)), [0], [(0, 0)])
    with pytest.raises(PreconditionError):
        StationaryTower(valence2)


def test_minlength_fibonacci(fib_setup):
    tower = fib_setup[0]
    # Fibonacci numbers 1, 1, 2, 3, 5, 8, 13
    assert [tower.minlength(n) for n in range(7)] == [1, 1, 2, 3, 5, 8, 13]
    assert tower.level_for_length(5) == 4
    assert all(tower.minlength(n) >= 1 for n in range(7))


def test_minlength_thue_morse(tm_setup):
    tower = tm_setup[0]
    assert [tower.minlength(n) for n in range(6)] == [1, 2, 4, 8, 16, 32]


def test_level_zero_is_identity(fib_setup):
    tower = fib_setup[0]
    for e in tower.graph.oriented_edges:
        assert tower.word(e, 0) == (e,)


def test_level_map_compatibility(fib_setup):
    """Tower maps compose on the nose: the (k,m)-map after the (m,n)-map is
    the (k,n)-map."""
    tower = fib_setup[0]
    f = tower.f
    for k, m, n in [(0, 0, 0), (0, 1, 2), (1, 2, 4), (0, 2, 5), (2, 3, 6)]:
        lhs = tower.level_map(k, m)
        rhs = tower.level_map(m, n)
        comp_words = [lhs.map_path(rhs.image(e)) for e in tower.graph.positive_edges]
        direct = tower.level_map(k, n)
        assert comp_words == [direct.image(e) for e in tower.graph.positive_edges]
    assert tower.level_map(0, 2) == power(f, 2)
    assert tower.level_map(2, 2).edge_image == ((A,), (B,))


def test_subdivision_counts(fib_setup):
    tower = fib_setup[0]
    assert len(tower.word(A, 2)) == 3
    assert len(tower.word(B, 2)) == 2


def test_level_graph_matches_virtual_structure(fib_setup):
    tower = fib_setup[0]
    for n in range(4):
        sf = tower.level_graph(n)
        # one short edge per virtual address, mapped to the same letters
        assert sf.pieces == tuple(len(tower.word(2 * k, n))
                                  for k in range(tower.graph.n_edges))
        for k in range(tower.graph.n_edges):
            for i in range(sf.pieces[k]):
                short = sf.piece_edge[(2 * k, i)]
                assert sf.map.image(short) == (tower.image_letter((2 * k, i), n),)


def test_image_at_level(fib_setup):
    tower = fib_setup[0]
    # words refine consistently between levels
    for n, m in [(2, 1), (3, 1), (3, 2), (4, 0)]:
        for e in tower.graph.oriented_edges:
            for j in range(len(tower.word(e, n))):
                se = tower.image_at_level((e, j), n, m)
                # mapping down to level 0 in two hops agrees with one hop
                letter_direct = tower.image_letter((e, j), n)
                letter_via = tower.image_letter(se, m)
                assert letter_direct == letter_via


def test_vector_tower_requires_expansion_eigenpair(fib_setup, golden_root):
    tower = fib_setup[0]
    with pytest.raises(PreconditionError):
        VectorTower(tower, (ia.one(), ia.one()), golden_root)  # not an eigenvector
    with pytest.raises(PreconditionError):
        VectorTower(tower, (golden_root.interval(), ia.one()), ia.exact(1))


def test_vector_tower_levels(fib_setup):
    _, vt, _, _ = fib_setup
    # compatibility: M(f) (v / lam^{n+1}) = v / lam^n
    m = vt.f_matrix()
    for n in range(4):
        high = vt.level_vector(n + 1)
        low = vt.level_vector(n)
        for i in range(2):
            acc = ia.zero()
            for j in range(2):
                acc = acc + ia.exact(m[i][j]) * high[j]
            assert ia.contains_zero(acc - low[i])
    # sup norm of the level vectors tends to zero
    assert vt.sup_norm_level(40) < 1e-8


def test_turn_weights_fibonacci(fib_setup):
    _, _, wt, _ = fib_setup
    inv_phi = 1 / PHI
    expected = {
        make_turn(Abar, B): 1.0,
        make_turn(Bbar, A): 1.0,
        make_turn(Abar, A): inv_phi,
        make_turn(A, B): 0.0,
        make_turn(Abar, Bbar): 0.0,
        make_turn(B, Bbar): 0.0,
    }
    for turn, val in expected.items():
        assert abs(ia.midpoint(wt.turn_weight[turn]) - val) < 1e-12
    # switch condition at the direction ~a written out: w(a) = w({~a,a}) +
    # w({~a,b}) + w({~a,~b}) = 1/phi + 1 + 0 = phi
    lhs = wt.edge_weight[A]
    rhs = wt.turn_weight[make_turn(Abar, A)] + wt.turn_weight[make_turn(Abar, B)] \
        + wt.turn_weight[make_turn(Abar, Bbar)]
    assert ia.contains_zero(lhs - rhs)


def test_turn_weights_thue_morse(tm_setup):
    _, _, wt, _ = tm_setup
    expected = {
        make_turn(Abar, B): 2 / 3,
        make_turn(Bbar, A): 2 / 3,
        make_turn(Abar, A): 1 / 3,
        make_turn(B, Bbar): 1 / 3,
        make_turn(A, B): 0.0,
        make_turn(Abar, Bbar): 0.0,
    }
    for turn, val in expected.items():
        assert abs(ia.midpoint(wt.turn_weight[turn]) - val) < 1e-15


def test_switch_conditions(fib_setup, tm_setup):
    for setup in (fib_setup, tm_setup):
        wt = setup[2]
        assert wt.check_switch_conditions()
        for residual in wt.switch_residuals().values():
            assert ia.sup_abs(residual) < 1e-12


def test_illegal_turns_have_zero_weight(fib_setup, tm_setup):
    for setup in (fib_setup, tm_setup):
        wt = setup[2]
        assert wt.check_illegal_zero()


def test_turn_weight_bounded_by_edge_weights(fib_setup, tm_setup):
    for setup in (fib_setup, tm_setup):
        assert setup[2].check_turn_bounds()


def test_compatibility_is_eigen_identity(fib_setup):
    _, _, wt, _ = fib_setup
    assert all(ia.contains_zero(r) for r in wt.compatibility_residual())


def test_weight_determination_identity(fib_setup):
    """The weight of a level-m short edge equals the total weight of all
    legal level-n paths lying over its radius-r windows, once level-n long
    edges exceed the window length."""
    tower, vt, wt, _ = fib_setup
    for m, r in [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]:
        n = m
        while tower.minlength(n) < 2 * r + 1:
            n += 1
        n = max(n, m)
        for center in tower.short_edges(m):
            windows = [w for w in tower.windows(center, r, m)
                       if tower.is_level_path_legal(w, m)]
            total = ia.zero()
            for w in windows:
                for lifted in _level_preimages(tower, w, m, n):
                    total = total + wt.level_path_weight(lifted, n)
            target = wt.edge_weight_at(center[0], m)
            assert ia.sup_abs(total - target) < 1e-12, (m, r, center)


def _level_preimages(tower, path, m, n):
    """Legal level-n paths mapping onto the given level-m path."""
    starts = [se for se in tower.short_edges(n)
              if tower.image_at_level(se, n, m) == path[0]]
    out = []

    def extend(prefix, idx):
        if idx == len(path):
            out.append(tuple(prefix))
            return
        for nxt in tower.successors(prefix[-1], n):
            if tower.image_at_level(nxt, n, m) == path[idx]:
                prefix.append(nxt)
                extend(prefix, idx + 1)
                prefix.pop()

    for s in starts:
        extend([s], 1)
    return [p for p in out if tower.is_level_path_legal(p, n)]


def test_tower_self_morphism(fib_setup, golden_root):
    tower, vt, _, _ = fib_setup
    morphism = tower_self_morphism(tower)
    image = image_vector_tower(morphism, vt)
    lam = golden_root.interval()
    for got, v in zip(image.vector, vt.vector):
        assert ia.contains_zero(got - lam * v)
    # commuting powers: M(g) M(f^{k}) = M(f^{k}) M(g)
    mg = morphism.matrix()
    mf2 = power(tower.f, 2).transition_matrix()
    assert matmul(mg, mf2) == matmul(mf2, mg)


def test_identity_morphism_fixes_vector_tower(fib_setup):
    from ttm.maps import identity_map
    tower, vt, _, _ = fib_setup
    ident = tower_self_morphism(tower, identity_map(tower.graph))
    image = image_vector_tower(ident, vt)
    for got, v in zip(image.vector, vt.vector):
        assert ia.contains_zero(got - v)


def test_repetition_bounds_fibonacci(fib_setup):
    tower = fib_setup[0]
    results = {n: repetition_bound(tower, n, 7) for n in range(4)}
    assert results[0].bound == 0
    assert results[1].bound == 1
    assert results[2].bound == 3
    assert results[3].bound == 6
    assert all(r.status == "found" for r in results.values())


def test_repetition_bound_witness(rose2):
    """Two edges with identical images defeat small windows and the search
    reports the violating pair."""
    g = rose(3, ("a", "b", "c"))
    a, b, c = 0, 2, 4
    f = GraphMap(g, g, [0], [(c,), (c,), (a, b, c)])
    tower = StationaryTower(f)
    r = repetition_bound(tower, 1, 0)
    assert not r.found
    assert r.status == "not-found-within-cap"
    assert r.witness is not None
    w1, w2 = r.witness
    assert tower.path_image(w1, 1) == tower.path_image(w2, 1)
    assert w1[len(w1) // 2] != w2[len(w2) // 2]


def test_repetition_bound_legal_mode(fib_setup):
    """The strict mode quantifies over more windows, so its bound is at
    least the infinitely-legal one."""
    tower = fib_setup[0]
    strict = repetition_bound(tower, 1, 7, infinitely_legal=False)
    weak = repetition_bound(tower, 1, 7, infinitely_legal=True)
    assert strict.found and weak.found
    assert strict.bound >= weak.bound
