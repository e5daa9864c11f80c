"""Shared fixtures: the hand-built example models used across the suite."""

import random

import pytest

from imodal.folm import FOMStructure, IFOMStructure
from imodal.models import CNModel, IK2Model, INModel


def _refl(worlds, extra=()):
    return frozenset((w, w) for w in worlds) | frozenset(extra)


@pytest.fixture
def rng():
    return random.Random(20260808)


@pytest.fixture
def wm_model():
    """Two-world constructive model refuting the diamond-interaction axiom."""
    return CNModel(frozenset({"w", "v"}), _refl({"w", "v"}, {("w", "v")}),
                   {"w": frozenset({frozenset({"w"})}), "v": frozenset()},
                   {0: frozenset({"v"})})


@pytest.fixture
def nabla_model():
    """Two-world constructive model with empty gamma below a full powerset."""
    powerset = frozenset({frozenset(), frozenset({"w"}), frozenset({"v"}),
                          frozenset({"w", "v"})})
    return CNModel(frozenset({"w", "v"}), _refl({"w", "v"}, {("w", "v")}),
                   {"w": frozenset(), "v": powerset}, {})


@pytest.fixture
def ik2_model():
    """Four-world birelational frame refuting the translated interaction axiom."""
    worlds = frozenset("wvus")
    return IK2Model(worlds, _refl(worlds, {("w", "u"), ("v", "s")}),
                    frozenset({("w", "v"), ("u", "s")}),
                    frozenset({("s", "s")}), {})


@pytest.fixture
def ifom_example():
    """Three stacked classical structures with growing domains."""

    def level(states, nbhds, rel_n, rel_e, pred):
        return FOMStructure(frozenset(states), frozenset(nbhds),
                            frozenset(rel_n), frozenset(rel_e),
                            {0: frozenset(pred)})

    worlds = frozenset({"w1", "w2", "w3"})
    leq = _refl(worlds, {("w1", "w2"), ("w2", "w3"), ("w1", "w3")})
    return IFOMStructure(worlds, leq, {
        "w1": level(["d1", "d2"], ["a1"], [("d1", "a1")], [("a1", "d2")], ["d2"]),
        "w2": level(["d1", "d2", "d3"], ["a1"], [("d1", "a1"), ("d2", "a1")],
                    [("a1", "d2"), ("a1", "d3")], ["d2"]),
        "w3": level(["d1", "d2", "d3", "d4"], ["a1", "a2"],
                    [("d1", "a1"), ("d2", "a1"), ("d2", "a2")],
                    [("a1", "d2"), ("a1", "d3"), ("a2", "d4")], ["d2"]),
    })


@pytest.fixture
def figure1_frame():
    """Six-world neighbourhood frame used for the unravelling path examples."""
    worlds = frozenset("stuvwx")
    leq = _refl(worlds, {("w", "v"), ("u", "t"), ("s", "x")})
    nbhd = {"a": {"v": frozenset({"u", "t"}), "u": frozenset({"s"}),
                  "t": frozenset({"x"})}}
    return INModel(worlds, leq, nbhd, {})


@pytest.fixture
def box_bot_inm():
    """Two-world neighbourhood model refuting ([]F -> <>T) -> <>T."""
    return INModel(frozenset({"w", "u"}), _refl({"w", "u"}, {("w", "u")}),
                   {"a": {"w": frozenset(), "u": frozenset({"u"})}}, {})


@pytest.fixture
def one_point_inm():
    return INModel(frozenset({"w"}), _refl({"w"}),
                   {"a": {"w": frozenset({"w"})}}, {0: frozenset({"w"})})
