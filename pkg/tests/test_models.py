import pytest

from imodal.models import (CNModel, INModel, NbhdModel, check_full,
                           check_ik2_frame, check_inm, eval_classical,
                           eval_cnm, eval_ik2, eval_inm, find_isomorphism,
                           is_isomorphism, truth_set_inm, validate_ik2,
                           validate_inm)
from imodal.search import SearchBounds, enumerate_models, random_formula, random_inm
from imodal.syntax import Atom, Box, Dia, Or, parse, substitute

B = lambda s: parse(s, "bimodal")
N = lambda s: parse(s, "nabla")


class TestClassical:
    def test_vacuous_diamond(self):
        m = NbhdModel(frozenset({"w"}), {"w": frozenset()}, {})
        assert eval_classical(m, "w", parse("<>p0"))

    def test_empty_neighbourhood_boxes_falsum(self):
        m = NbhdModel(frozenset({"w"}), {"w": frozenset({frozenset()})}, {})
        assert eval_classical(m, "w", parse("[]F"))

    def test_material_implication(self):
        m = NbhdModel(frozenset({"w"}), {"w": frozenset()}, {0: frozenset()})
        assert eval_classical(m, "w", parse("p0 -> p1"))


class TestINM:
    def test_one_point(self, one_point_inm):
        assert eval_inm(one_point_inm, "w", parse("[]p0 & <>p0"))

    def test_box_bot_counterexample(self, box_bot_inm):
        assert not eval_inm(box_bot_inm, "w", parse("([]F -> <>T) -> <>T"))
        assert eval_inm(box_bot_inm, "w", parse("[]F -> <>T"))
        assert not eval_inm(box_bot_inm, "w", parse("<>T"))

    def test_interaction_axiom_valid(self, rng):
        phi = parse("([]T -> <>p0) -> <>p0")
        for _ in range(150):
            m = random_inm(rng, SearchBounds(4, 2, 1))
            assert truth_set_inm(m, phi) == m.worlds

    def test_unknown_world(self, one_point_inm):
        from imodal.models import ModelError
        with pytest.raises(ModelError):
            eval_inm(one_point_inm, "zz", parse("p0"))

    def test_persistence(self, rng):
        for _ in range(60):
            m = random_inm(rng, SearchBounds(3, 2, 1))
            for _ in range(5):
                phi = random_formula(rng, 3, 1)
                t = truth_set_inm(m, phi)
                for (a, b) in m.leq:
                    assert not (a in t and b not in t)

    def test_monotone_operators(self, rng):
        # a subset in truth sets is preserved by both modalities
        for _ in range(60):
            m = random_inm(rng, SearchBounds(3, 2, 2))
            phi = random_formula(rng, 2, 1)
            psi = Or(phi, random_formula(rng, 2, 2))
            assert truth_set_inm(m, phi) <= truth_set_inm(m, psi)
            assert truth_set_inm(m, Box(phi)) <= truth_set_inm(m, Box(psi))
            assert truth_set_inm(m, Dia(phi)) <= truth_set_inm(m, Dia(psi))


def _naive_inm(m, w, phi):
    """Literal world-at-a-time transcription of the displayed clauses; an
    independent oracle for the truth-set evaluator."""
    from imodal.orders import successors
    from imodal.syntax import And as A, Falsum as F, Implies as I, Or as O
    up = successors(m.worlds, m.leq, w)
    if isinstance(phi, Atom):
        return w in m.val.get(phi.index, frozenset())
    if isinstance(phi, F):
        return False
    if isinstance(phi, A):
        return _naive_inm(m, w, phi.left) and _naive_inm(m, w, phi.right)
    if isinstance(phi, O):
        return _naive_inm(m, w, phi.left) or _naive_inm(m, w, phi.right)
    if isinstance(phi, I):
        return all((not _naive_inm(m, v, phi.left)) or _naive_inm(m, v, phi.right)
                   for v in up)
    if isinstance(phi, Box):
        return any(w in a and all(_naive_inm(m, x, phi.sub)
                                  for v in up if v in a for x in a[v])
                   for a in m.nbhds.values())
    return all(any(_naive_inm(m, x, phi.sub) for x in a[v])
               for v in up for a in m.nbhds.values() if v in a)


class TestNaiveOracle:
    def test_truth_sets_agree_with_direct_quantifiers(self, rng):
        for _ in range(120):
            m = random_inm(rng, SearchBounds(4, 2, 2))
            for _ in range(5):
                phi = random_formula(rng, 3, 2)
                for w in m.worlds:
                    assert _naive_inm(m, w, phi) == eval_inm(m, w, phi)


class TestCNM:
    def test_wm_counterexample(self, wm_model):
        assert not eval_cnm(wm_model, "w", parse("[]T"))
        assert not eval_cnm(wm_model, "v", parse("[]T"))
        assert eval_cnm(wm_model, "w", parse("[]T -> <>p0"))
        assert not eval_cnm(wm_model, "w", parse("<>p0"))
        assert not eval_cnm(wm_model, "w", parse("([]T -> <>p0) -> <>p0"))

    def test_nabla_counterexample(self, nabla_model):
        assert not eval_cnm(nabla_model, "w", N("nabla T"))
        assert eval_cnm(nabla_model, "v", N("nabla F"))
        assert not eval_cnm(nabla_model, "w", N("~nabla F"))
        assert eval_cnm(nabla_model, "w", N("~nabla F -> nabla T"))
        assert not eval_cnm(nabla_model, "w", N("(~nabla F -> nabla T) -> nabla T"))

    def test_ex_falso(self, wm_model):
        for w in wm_model.worlds:
            assert eval_cnm(wm_model, w, parse("F -> p0"))


class TestIK2:
    def test_final_counterexample(self, ik2_model):
        big = B("(<N>[E]F -> [N]<E>T) -> [N]<E>T")
        assert not eval_ik2(ik2_model, "w", big)
        assert eval_ik2(ik2_model, "v", B("[N]<E>T"))
        assert not eval_ik2(ik2_model, "w", B("[N]<E>T"))
        assert eval_ik2(ik2_model, "w", B("<N>[E]F -> [N]<E>T"))

    def test_diamond_falsum_never_holds(self, ik2_model):
        for w in ik2_model.worlds:
            assert not eval_ik2(ik2_model, w, B("<N>F"))
            assert not eval_ik2(ik2_model, w, B("<E>F"))

    def test_frame_conditions(self, ik2_model):
        assert check_ik2_frame(ik2_model).ok
        assert validate_ik2(ik2_model) == []

    def test_identity_order_any_relations_pass(self):
        from imodal.models import IK2Model
        worlds = frozenset({0, 1})
        m = IK2Model(worlds, frozenset({(0, 0), (1, 1)}),
                     frozenset({(0, 1)}), frozenset({(1, 0), (1, 1)}), {})
        assert check_ik2_frame(m).ok


class TestCheckers:
    def test_figure1_coherent(self, figure1_frame):
        assert check_inm(figure1_frame, "coherent").ok

    def test_one_point_all_levels(self, one_point_inm):
        for level in ("basic", "coherent", "cartesian"):
            assert check_inm(one_point_inm, level).ok

    def test_coherence_violation_witnessed(self):
        # value shrinks along the order: the forward condition fails
        m = INModel(frozenset({0, 1}), frozenset({(0, 0), (1, 1), (0, 1)}),
                    {"a": {0: frozenset({0}), 1: frozenset()}}, {})
        report = check_inm(m, "coherent")
        assert not report.ok
        assert any(w[0] == "N1" for w in report.witnesses)

    def test_basic_violations(self):
        m = INModel(frozenset({0, 1}), frozenset({(0, 0), (1, 1), (0, 1)}),
                    {"a": {0: frozenset({0})}},  # domain not an upset
                    {0: frozenset({0})})         # valuation not an upset
        violations = validate_inm(m)
        assert ("domain-not-an-upset", "a") in violations
        assert ("valuation-not-an-upset", 0) in violations

    def test_check_full(self, wm_model):
        assert not check_full(wm_model)
        empty = CNModel(frozenset({"w"}), frozenset({("w", "w")}),
                        {"w": frozenset()}, {})
        assert check_full(empty)

    def test_report_shape(self, figure1_frame):
        report = check_inm(figure1_frame, "coherent")
        payload = report.to_json()
        assert payload["check"] == "inm-coherent"
        assert payload["status"] == "pass"
        assert payload["witnesses"] == []


class TestAxiomSoundness:
    def test_enumerated_models(self):
        from imodal.calculi import NEG_A, I_DIA
        subs = [Atom(0), parse("[]p0"), parse("<>~p0"), parse("F")]
        instances = [substitute(s, {0: f}) for s in (NEG_A, I_DIA) for f in subs]
        count = 0
        for m in enumerate_models("inm", SearchBounds(2, 1, 1)):
            count += 1
            memo = {}
            for inst in instances:
                assert truth_set_inm(m, inst, memo) == m.worlds
        assert count > 100

    def test_random_models(self, rng):
        from imodal.calculi import NEG_A, I_DIA
        subs = [Atom(0), parse("[]p1"), parse("~<>p0")]
        instances = [substitute(s, {0: f}) for s in (NEG_A, I_DIA) for f in subs]
        for _ in range(300):
            m = random_inm(rng, SearchBounds(4, 2, 2))
            memo = {}
            for inst in instances:
                assert truth_set_inm(m, inst, memo) == m.worlds


class TestIsomorphism:
    def test_identity(self, figure1_frame):
        result = find_isomorphism(figure1_frame, figure1_frame)
        assert result is not None
        alpha, nu = result
        assert is_isomorphism(figure1_frame, figure1_frame, alpha, nu)

    def test_relabelled_copy(self, figure1_frame):
        relabel = {w: w.upper() for w in figure1_frame.worlds}
        copy = INModel(
            frozenset(relabel.values()),
            frozenset((relabel[a], relabel[b]) for (a, b) in figure1_frame.leq),
            {"b": {relabel[w]: frozenset(relabel[v] for v in value)
                   for w, value in figure1_frame.nbhds["a"].items()}},
            {})
        result = find_isomorphism(figure1_frame, copy)
        assert result is not None
        alpha, nu = result
        assert is_isomorphism(figure1_frame, copy, alpha, nu)
        assert nu == {"a": "b"}

    def test_cardinality_obstruction(self, figure1_frame, one_point_inm):
        assert find_isomorphism(figure1_frame, one_point_inm) is None

    def test_non_isomorphic_same_size(self, one_point_inm):
        other = INModel(frozenset({"w"}), frozenset({("w", "w")}),
                        {"a": {"w": frozenset()}}, {0: frozenset({"w"})})
        assert find_isomorphism(one_point_inm, other) is None

    def test_truth_invariant_under_isomorphism(self, rng):
        for _ in range(20):
            m = random_inm(rng, SearchBounds(3, 2, 1))
            relabel = {w: ("copy", w) for w in m.worlds}
            copy = INModel(
                frozenset(relabel.values()),
                frozenset((relabel[a], relabel[b]) for (a, b) in m.leq),
                {name: {relabel[w]: frozenset(relabel[v] for v in value)
                        for w, value in fn.items()}
                 for name, fn in m.nbhds.items()},
                {i: frozenset(relabel[w] for w in ext) for i, ext in m.val.items()})
            result = find_isomorphism(m, copy)
            assert result is not None
            alpha, _ = result
            for _ in range(5):
                phi = random_formula(rng, 2, 1)
                for w in m.worlds:
                    assert eval_inm(m, w, phi) == eval_inm(copy, alpha[w], phi)
