import pytest

from imodal.folm import eval_modal_ifom, validate_ifom
from imodal.models import (INModel, check_full, check_ik2_frame, check_inm,
                           eval_cnm, eval_ik2, eval_inm, find_isomorphism,
                           nbhd_relation)
from imodal.orders import equivalence_classes
from imodal.search import (SearchBounds, random_cnm, random_coherent_inm,
                           random_formula, random_ifom, random_inm)
from imodal.syntax import parse, show, translate_bimodal
from imodal.transforms import (Path, TransformError, TruncationBudget, bullet,
                               circle, coherent_completion, default_budget,
                               fullify, hat, leq_ur, order_height, path_valid,
                               star, unravel)

REFL2 = frozenset({("w", "w"), ("v", "v"), ("w", "v")})


def chain2(nbhds, val=None):
    return INModel(frozenset({"w", "v"}), REFL2, nbhds, val or {})


class TestPath:
    def test_accessors(self):
        p = Path(("w", "v", "u"), (None, "a"))
        assert p.first == "w" and p.last == "u" and p.length == 2
        assert p.order_part.worlds == ("w", "v")
        assert p.nbhd_part.worlds == ("v", "u")
        assert p.is_unravelling

    def test_not_unravelling(self):
        p = Path(("w", "v", "u"), ("a", None))
        assert not p.is_unravelling

    def test_validity(self, figure1_frame):
        assert path_valid(figure1_frame, Path(("w", "v", "u"), (None, "a")))
        assert not path_valid(figure1_frame, Path(("w", "u"), (None,)))
        assert not path_valid(figure1_frame, Path(("w", "v"), ("a",)))

    def test_budget_validation(self):
        with pytest.raises(ValueError):
            TruncationBudget(0, 3)


class TestUnravellingOrder:
    def test_documented_path_relations(self, figure1_frame):
        p1 = Path(("w", "v", "u", "s"), (None, "a", "a"))
        p2 = Path(("w", "v", "t", "x"), (None, "a", "a"))
        p3 = Path(("w", "v", "v", "u", "s"), (None, None, "a", "a"))
        assert leq_ur(figure1_frame, p1, p3)
        assert not leq_ur(figure1_frame, p1, p2)
        assert leq_ur(figure1_frame, p1, p1)

    def test_extension_with_pointwise_moves(self, figure1_frame):
        p1 = Path(("w", "v", "u", "s"), (None, "a", "a"))
        p3_moved = Path(("w", "v", "v", "t", "x"), (None, None, "a", "a"))
        assert leq_ur(figure1_frame, p1, p3_moved)

    def test_rejects_non_unravelling_paths(self, figure1_frame):
        mixed = Path(("v", "u", "t"), ("a", None))
        with pytest.raises(ValueError):
            leq_ur(figure1_frame, mixed, mixed)


class TestUnravel:
    def test_trivial(self):
        m = INModel(frozenset({"w"}), frozenset({("w", "w")}), {}, {})
        u = unravel(m, "w", TruncationBudget(1, 1))
        # only the empty path and its reflexive order extension
        assert Path(("w",), ()) in u.worlds
        assert all(p.last == "w" for p in u.worlds)

    def test_requires_coherent(self):
        bad = chain2({"a": {"w": frozenset({"w"}), "v": frozenset()}})
        with pytest.raises(TransformError):
            unravel(bad, "w", TruncationBudget(1, 2))

    def test_structure_items(self, rng):
        # over truncated unravellings: order parts coincide exactly on
        # membership-equivalent paths, the unravelling order preserves the
        # neighbourhood-part length, and equal-length comparable paths are equal
        for _ in range(25):
            m = random_coherent_inm(rng, SearchBounds(3, 1, 1))
            u = unravel(m, min(m.worlds), TruncationBudget(1, 4))
            uf_r = equivalence_classes(u.worlds, nbhd_relation(u))
            uf_leq = equivalence_classes(u.worlds, u.leq)
            paths = sorted(u.worlds, key=str)
            for p in paths:
                for q in paths:
                    if uf_leq.same(p, q):
                        assert p.nbhd_part.length == q.nbhd_part.length
                    if (p, q) in u.leq and p.length == q.length:
                        assert p == q
                    assert uf_r.same(p, q) == (p.order_part.worlds == q.order_part.worlds)

    def test_equivalence_closure_of_order_merges_histories(self):
        # Documented divergence: the closure of the unravelling order can relate
        # distinct equal-length paths through a longer common extension, so the
        # truncated unravelling need not pass the cartesian check.
        m = INModel(frozenset({0, 1}), frozenset({(0, 0), (1, 1), (0, 1)}),
                    {"a": {0: frozenset({0, 1}), 1: frozenset({1})}}, {})
        assert check_inm(m, "coherent").ok
        u = unravel(m, 0, TruncationBudget(1, 2))
        r1 = Path((0, 0), ("a",))
        r2 = Path((0, 1), ("a",))
        top = Path((0, 1, 1), (None, "a"))
        assert leq_ur(m, r1, top) and leq_ur(m, r2, top)
        uf_leq = equivalence_classes(u.worlds, u.leq)
        assert uf_leq.same(r1, r2) and r1 != r2
        assert not check_inm(u, "cartesian").ok

    def test_truth_at_root_small_budgets(self, rng):
        for _ in range(15):
            m = random_coherent_inm(rng, SearchBounds(2, 1, 1))
            root_world = min(m.worlds)
            u = unravel(m, root_world, TruncationBudget(1, 4))
            root = Path((root_world,), ())
            for _ in range(4):
                phi = random_formula(rng, 2, 1)
                assert eval_inm(u, root, phi) == eval_inm(m, root_world, phi)


class TestCoherentCompletion:
    def test_chain_shape(self):
        m = chain2({"a": {"w": frozenset({"w"}), "v": frozenset({"v"})}})
        c = coherent_completion(m, TruncationBudget(2, 1))
        assert c.worlds == {("w", 0), ("v", 0), ("v", 1), ("v", 2)}

    def test_forward_condition_everywhere(self, rng):
        for _ in range(25):
            m = random_inm(rng, SearchBounds(3, 2, 1))
            c = coherent_completion(m, TruncationBudget(2, 1))
            assert check_inm(c, "basic").ok
            n1 = [w for w in check_inm(c, "coherent").witnesses if w[0] == "N1"]
            assert n1 == []

    def test_truth_agreement(self, rng):
        for _ in range(25):
            m = random_inm(rng, SearchBounds(3, 2, 1))
            c = coherent_completion(m, TruncationBudget(4, 1))
            for _ in range(5):
                phi = random_formula(rng, 2, 1)
                for w in m.worlds:
                    assert eval_inm(c, (w, 0), phi) == eval_inm(m, w, phi), show(phi)


class TestBullet:
    def test_example_structure(self, ifom_example):
        b = bullet(ifom_example)
        assert ("w1", "d1") in b.worlds and ("w1", "d2") in b.worlds
        assert eval_inm(b, ("w1", "d1"), parse("<>p0"))

    def test_trivial(self):
        from imodal.folm import FOMStructure, IFOMStructure
        s = IFOMStructure(frozenset({"w"}), frozenset({("w", "w")}),
                          {"w": FOMStructure(frozenset({"d"}), frozenset(),
                                             frozenset(), frozenset(), {})})
        b = bullet(s)
        assert b.worlds == {("w", "d")} and b.nbhds == {}

    def test_images_are_coherent_cartesian(self, rng):
        for _ in range(30):
            s = random_ifom(rng, 3, 2, 2, 1)
            b = bullet(s)
            assert check_inm(b, "coherent").ok
            assert check_inm(b, "cartesian").ok

    def test_agreement_with_pair_semantics(self, rng):
        for _ in range(20):
            s = random_ifom(rng, 3, 2, 2, 1)
            b = bullet(s)
            for _ in range(5):
                phi = random_formula(rng, 3, 1)
                for w in s.worlds:
                    for x in s.interp[w].states:
                        assert eval_modal_ifom(s, w, x, phi) == eval_inm(b, (w, x), phi)


class TestCircle:
    def test_one_point(self, one_point_inm):
        fo = circle(one_point_inm)
        level = fo.interp["w"]
        assert level.relN == {("w", "a")} and level.relE == {("a", "w")}

    def test_round_trip_isomorphism(self, rng):
        for _ in range(25):
            s = random_ifom(rng, 3, 2, 2, 1)
            b = bullet(s)
            back = bullet(circle(b))
            assert find_isomorphism(b, back) is not None

    def test_rejects_non_cartesian(self):
        # membership-equivalent worlds with different values under one
        # neighbourhood violate the per-neighbourhood condition
        worlds = frozenset({0, 1})
        leq = frozenset({(0, 0), (1, 1)})
        m = INModel(worlds, leq,
                    {"a": {0: frozenset({1}), 1: frozenset({0, 1})}}, {})
        assert check_inm(m, "coherent").ok
        assert not check_inm(m, "cartesian").ok
        with pytest.raises(TransformError):
            circle(m)

    def test_output_is_valid_structure(self, rng):
        for _ in range(15):
            b = bullet(random_ifom(rng, 3, 2, 2, 1))
            assert validate_ifom(circle(b)) == []


class TestHat:
    def test_example(self):
        m = chain2({"a": {"w": frozenset({"w"}), "v": frozenset({"v"})}})
        h = hat(m)
        assert len(h.worlds) == 3

    def test_no_neighbourhoods(self):
        m = INModel(frozenset({"w"}), frozenset({("w", "w")}), {}, {})
        h = hat(m)
        assert len(h.worlds) == 1
        assert list(h.gamma.values()) == [frozenset()]

    def test_truth_and_fullness(self, rng):
        for _ in range(25):
            m = random_inm(rng, SearchBounds(3, 2, 1))
            h = hat(m)
            assert check_full(h)
            for _ in range(5):
                phi = random_formula(rng, 3, 1)
                for (w, sigma) in h.worlds:
                    assert eval_cnm(h, (w, sigma), phi) == eval_inm(m, w, phi)


class TestFullify:
    def test_clause(self, wm_model):
        out = fullify(wm_model)
        assert out.gamma["w"] == frozenset()
        assert check_full(out)

    def test_fixpoint(self, rng):
        m = fullify(random_cnm(rng, SearchBounds(3, 2, 1)))
        again = fullify(m)
        assert again.gamma == m.gamma

    def test_preserves_single_modality_truth(self, rng):
        for _ in range(30):
            m = random_cnm(rng, SearchBounds(3, 2, 1))
            out = fullify(m)
            assert check_full(out)
            for _ in range(5):
                phi = random_formula(rng, 3, 1, dialect="nabla")
                for w in m.worlds:
                    assert eval_cnm(m, w, phi) == eval_cnm(out, w, phi)


class TestStar:
    def test_example(self):
        m = chain2({"a": {"w": frozenset({"w"}), "v": frozenset({"v"})}})
        out = star(m)
        assert len(out.worlds) == 4
        assert out.relN == {("w", ("@nbhd", "a", "w")), ("v", ("@nbhd", "a", "v"))}
        assert out.relE == {(("@nbhd", "a", "w"), "w"), (("@nbhd", "a", "v"), "v")}
        assert check_ik2_frame(out).ok

    def test_empty(self):
        m = INModel(frozenset({"w"}), frozenset({("w", "w")}), {}, {})
        out = star(m)
        assert out.worlds == {"w"}
        assert out.relN == frozenset() and out.relE == frozenset()

    def test_requires_coherent(self):
        bad = chain2({"a": {"w": frozenset({"w"}), "v": frozenset()}})
        with pytest.raises(TransformError):
            star(bad)

    def test_truth_via_translation(self, rng):
        for _ in range(25):
            m = random_coherent_inm(rng, SearchBounds(3, 2, 1))
            out = star(m)
            assert check_ik2_frame(out).ok
            for _ in range(5):
                phi = random_formula(rng, 2, 1)
                for w in m.worlds:
                    assert eval_inm(m, w, phi) == \
                        eval_ik2(out, w, translate_bimodal(phi))


class TestBudgets:
    def test_defaults(self):
        b = default_budget(2, 1)
        assert b.coh_levels == 4 and b.unravel_len == 8

    def test_height(self, figure1_frame, one_point_inm):
        assert order_height(one_point_inm) == 0
        assert order_height(figure1_frame) == 1
