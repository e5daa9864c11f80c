import pytest

from imodal.models import (check_full, check_ik2_frame, check_inm, eval_cnm,
                           eval_inm, validate_cnm, validate_inm)
from imodal.folm import validate_ifom
from imodal.search import (CounterexampleFound, NoneWithinBounds, RefutedAt,
                           SearchBounds, UnrefutedWithinBounds,
                           enumerate_models, find_countermodel,
                           oracle_consequence, random_cnm, random_coherent_inm,
                           random_formula, random_ifom, random_inm,
                           strict_posets, sweep_inm_validity, upsets_of_poset)
from imodal.syntax import Atom, consecution, parse, substitute


class TestEnumeration:
    def test_single_world_count(self):
        models = list(enumerate_models("inm", SearchBounds(1, 0, 1)))
        assert len(models) == 2

    def test_models_are_valid(self):
        for m in enumerate_models("inm", SearchBounds(2, 1, 1)):
            assert validate_inm(m) == []

    def test_cartesian_filter(self):
        for m in enumerate_models("inm", SearchBounds(2, 1, 0, require_cartesian=True)):
            assert check_inm(m, "cartesian").ok

    def test_coherent_filter(self):
        seen = 0
        for m in enumerate_models("inm", SearchBounds(2, 1, 0, require_coherent=True)):
            seen += 1
            assert check_inm(m, "coherent").ok
        assert seen

    def test_ik2_filter(self):
        for m in enumerate_models("ik2", SearchBounds(2, 0, 1)):
            assert check_ik2_frame(m).ok

    def test_full_filter(self):
        for m in enumerate_models("cnm", SearchBounds(2, 1, 0, require_full=True)):
            assert check_full(m)

    def test_cnm_models_are_valid(self):
        count = 0
        for m in enumerate_models("cnm", SearchBounds(2, 1, 1)):
            count += 1
            assert validate_cnm(m) == []
        assert count

    def test_ifom_models_are_valid(self):
        count = 0
        for m in enumerate_models("ifom", SearchBounds(1, 1, 1)):
            count += 1
            assert validate_ifom(m) == []
        assert count

    def test_restartable_and_deterministic(self):
        bounds = SearchBounds(2, 1, 1)
        first = list(enumerate_models("inm", bounds))
        second = list(enumerate_models("inm", bounds))
        assert first == second

    def test_dedup_flag(self):
        bounds = SearchBounds(2, 1, 0)
        plain = list(enumerate_models("inm", bounds))
        deduped = list(enumerate_models("inm", bounds, dedup=True))
        assert len(deduped) < len(plain)
        from imodal.models import find_isomorphism
        for i, a in enumerate(deduped):
            for b in deduped[i + 1:]:
                assert find_isomorphism(a, b) is None
        with pytest.raises(ValueError):
            next(enumerate_models("cnm", bounds, dedup=True))

    def test_posets_are_transitive(self):
        for strict in strict_posets(3):
            for (a, b) in strict:
                for (b2, c) in strict:
                    if b2 == b:
                        assert (a, c) in strict

    def test_upsets_generated_directly(self):
        leq = frozenset({(0, 0), (1, 1), (2, 2), (0, 1), (0, 2)})
        ups = upsets_of_poset(3, leq)
        assert frozenset({0, 1, 2}) in ups
        assert all(not (0 in u and (1 not in u or 2 not in u)) for u in ups)
        assert len(ups) == 5


class TestFindCountermodel:
    def test_two_world_counterexample(self):
        phi = parse("([]F -> <>T) -> <>T")
        result = find_countermodel(consecution([], phi), "inm", SearchBounds(2, 2, 0))
        assert isinstance(result, CounterexampleFound)
        assert len(result.model.worlds) <= 2
        assert not eval_inm(result.model, result.world, phi)

    def test_cnm_counterexample(self):
        phi = parse("([]T -> <>p0) -> <>p0")
        result = find_countermodel(consecution([], phi), "cnm", SearchBounds(2, 1, 1))
        assert isinstance(result, CounterexampleFound)
        assert len(result.model.worlds) <= 2
        assert not eval_cnm(result.model, result.world, phi)

    def test_atom_refuted_by_one_world(self):
        result = find_countermodel(consecution([], parse("p0")), "inm",
                                   SearchBounds(1, 0, 1))
        assert isinstance(result, CounterexampleFound)
        assert len(result.model.worlds) == 1

    def test_valid_formula_unrefuted(self):
        phi = parse("([]T -> <>p0) -> <>p0")
        result = find_countermodel(consecution([], phi), "inm", SearchBounds(2, 2, 1))
        assert isinstance(result, NoneWithinBounds)
        assert not result.timed_out
        assert result.examined > 1000

    def test_timeout_flag(self):
        phi = parse("([]T -> <>p0) -> <>p0")
        result = find_countermodel(consecution([], phi), "inm",
                                   SearchBounds(4, 3, 1), timeout_ms=400)
        assert isinstance(result, NoneWithinBounds)
        assert result.timed_out

    def test_context_constrains_search(self):
        result = find_countermodel(
            consecution([parse("p0")], parse("p0")), "inm", SearchBounds(2, 1, 1))
        assert isinstance(result, NoneWithinBounds)

    def test_dialect_mismatch(self):
        with pytest.raises(ValueError):
            find_countermodel(consecution([], parse("[N]p0", "bimodal")), "inm",
                              SearchBounds(1, 0, 1))

    def test_determinism(self):
        phi = parse("<>p0 -> []p0")
        bounds = SearchBounds(2, 1, 1)
        a = find_countermodel(consecution([], phi), "inm", bounds)
        b = find_countermodel(consecution([], phi), "inm", bounds)
        assert isinstance(a, CounterexampleFound)
        assert (a.model, a.world, a.index) == (b.model, b.world, b.index)

    def test_worker_count_does_not_change_result(self):
        phi = parse("<>p0 -> []p0")
        bounds = SearchBounds(2, 1, 1)
        solo = find_countermodel(consecution([], phi), "inm", bounds, workers=1)
        duo = find_countermodel(consecution([], phi), "inm", bounds, workers=2)
        assert (solo.model, solo.world, solo.index) == (duo.model, duo.world, duo.index)

    def test_ifom_kind(self):
        result = find_countermodel(consecution([], parse("p0")), "ifom",
                                   SearchBounds(1, 1, 1))
        assert isinstance(result, CounterexampleFound)

    def test_classical_monotone_box_small(self):
        phi = parse("[](p0 & p1) -> []p0")
        result = find_countermodel(consecution([], phi), "classical",
                                   SearchBounds(2, 2, 2))
        assert isinstance(result, NoneWithinBounds)


class TestOracle:
    def test_element_unrefuted(self):
        assert isinstance(oracle_consequence([parse("p0")], parse("p0"), "inm",
                                             SearchBounds(2, 1, 1)),
                          UnrefutedWithinBounds)

    def test_atom_refuted(self):
        result = oracle_consequence([], parse("p0"), "inm", SearchBounds(1, 0, 1))
        assert isinstance(result, RefutedAt)

    def test_box_does_not_force_diamond(self):
        # A neighbourhood with an empty value witnesses the box and refutes
        # the diamond, so the consequence is refutable at one world.
        result = oracle_consequence([parse("[]p0")], parse("<>p0"), "inm",
                                    SearchBounds(3, 2, 1))
        assert isinstance(result, RefutedAt)
        assert eval_inm(result.model, result.world, parse("[]p0"))
        assert not eval_inm(result.model, result.world, parse("<>p0"))


class TestRandomGenerators:
    def test_inm_valid(self, rng):
        for _ in range(100):
            assert validate_inm(random_inm(rng, SearchBounds(4, 2, 2))) == []

    def test_coherent_generator(self, rng):
        for _ in range(60):
            m = random_coherent_inm(rng, SearchBounds(3, 2, 1))
            assert check_inm(m, "coherent").ok

    def test_cnm_valid(self, rng):
        for _ in range(100):
            assert validate_cnm(random_cnm(rng, SearchBounds(3, 2, 1))) == []

    def test_ifom_valid(self, rng):
        for _ in range(100):
            assert validate_ifom(random_ifom(rng, 4, 3, 2, 2)) == []

    def test_formula_depth_budget(self, rng):
        from imodal.syntax import modal_depth
        for _ in range(200):
            assert modal_depth(random_formula(rng, 3, 2)) <= 3


class TestSweep:
    def test_matches_streaming_reference(self):
        from imodal.calculi import NEG_A, I_DIA
        formulas = [substitute(NEG_A, {0: Atom(0)}),
                    substitute(I_DIA, {0: Atom(0)}),
                    parse("([]F -> <>T) -> <>T"),
                    parse("p0"),
                    parse("[]p0 -> p0"),
                    parse("<>p0 | ~<>p0"),
                    parse("F -> p0")]
        bounds = SearchBounds(2, 1, 1)
        verdicts = sweep_inm_validity(formulas, bounds)
        for phi, witness in zip(formulas, verdicts):
            reference = find_countermodel(consecution([], phi), "inm", bounds)
            assert (witness is None) == isinstance(reference, NoneWithinBounds)
            if witness is not None:
                model, world = witness
                assert not eval_inm(model, world, phi)

    def test_rejects_large_neighbourhood_bounds(self):
        with pytest.raises(ValueError):
            sweep_inm_validity([parse("p0")], SearchBounds(1, 3, 1))


@pytest.mark.slow
class TestClassicalSanity:
    def test_monotone_box_has_no_countermodel(self):
        # material-box monotonicity over the full classical space
        phi = parse("[](p0 & p1) -> []p0")
        result = find_countermodel(consecution([], phi), "classical",
                                   SearchBounds(3, 3, 2), workers=2)
        assert isinstance(result, NoneWithinBounds)
        assert not result.timed_out
