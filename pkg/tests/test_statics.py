"""Bidirectional statics: consistency, matched arrows, synthesis/analysis."""

from __future__ import annotations

import itertools
import random

import pytest
from generators import gen_state, gen_synthetic, gen_type

from hazel_kernel.statics import (
    InconsistentTypes, LamAgainstNonArrow, NoSynthRule, NotAFunction,
    UnboundVariable, analyze, consistent, cursor_info, matched_arrow,
    synthesize,
)
from hazel_kernel.syntax import (
    Ap, Arrow, Asc, EHole, HoleNamer, Lam, NEHole, Num, NumLit, Plus, THole,
    Var, place_cursor,
)


def types_up_to_depth(depth: int):
    if depth <= 1:
        return [Num(), THole()]
    smaller = types_up_to_depth(depth - 1)
    return [Num(), THole()] + [Arrow(a, b) for a, b in itertools.product(smaller, smaller)]


def test_consistent_with_hole():
    assert consistent(Num(), THole())
    assert consistent(THole(), Arrow(Num(), Num()))


def test_consistent_reflexive_on_example():
    assert consistent(Num(), Num())


def test_consistency_not_transitive():
    # arrow ~ ? and ? ~ num, yet arrow !~ num
    assert consistent(Arrow(Num(), Num()), THole())
    assert consistent(THole(), Num())
    assert not consistent(Arrow(Num(), Num()), Num())


def test_consistency_reflexive_symmetric_exhaustive():
    universe = types_up_to_depth(2)
    for t in universe:
        assert consistent(t, t)
    for t1, t2 in itertools.product(universe, universe):
        assert consistent(t1, t2) == consistent(t2, t1)


def test_matched_arrow():
    assert matched_arrow(Arrow(Num(), THole())) == (Num(), THole())
    assert matched_arrow(THole()) == (THole(), THole())
    assert matched_arrow(Num()) is None


def test_matched_arrow_consistent_with_source():
    for t in types_up_to_depth(3):
        arrow = matched_arrow(t)
        if arrow is not None:
            assert consistent(t, Arrow(*arrow))


def test_synthesize_hole():
    assert synthesize({}, EHole(0)) == THole()


def test_synthesize_identity_application():
    e = Ap(Asc(Lam("x", Var("x")), Arrow(Num(), Num())), NumLit(2))
    assert synthesize({}, e) == Num()


def test_synthesize_hole_application():
    # matched_arrow(?) = (?, ?); the argument is analyzed against ?
    assert synthesize({}, Ap(EHole(0), NumLit(2))) == THole()


def test_synthesize_var_and_unbound():
    assert synthesize({"x": Num()}, Var("x")) == Num()
    with pytest.raises(UnboundVariable):
        synthesize({}, Var("x"))


def test_synthesize_plus():
    assert synthesize({}, Plus(NumLit(1), EHole(0))) == Num()
    with pytest.raises(InconsistentTypes):
        synthesize({}, Plus(Asc(Lam("x", Var("x")), Arrow(Num(), Num())), NumLit(1)))


def test_bare_lambda_does_not_synthesize():
    with pytest.raises(NoSynthRule):
        synthesize({}, Lam("x", Var("x")))


def test_apply_non_function():
    with pytest.raises(NotAFunction):
        synthesize({}, Ap(NumLit(3), NumLit(4)))


def test_nehole_synthesizes_hole_type_but_subject_must_synthesize():
    assert synthesize({}, NEHole(0, NumLit(3))) == THole()
    with pytest.raises(NoSynthRule):
        synthesize({}, NEHole(0, Lam("x", Var("x"))))


def test_analyze_lambda():
    analyze({}, Lam("x", Var("x")), Arrow(Num(), Num()))


def test_analyze_lambda_against_hole_type():
    analyze({}, Lam("x", Var("x")), THole())


def test_analyze_literal_against_arrow_fails():
    with pytest.raises(InconsistentTypes):
        analyze({}, NumLit(3), Arrow(Num(), Num()))


def test_analyze_lam_against_num_fails():
    with pytest.raises(LamAgainstNonArrow):
        analyze({}, Lam("x", Var("x")), Num())


def test_shadowing():
    e = Lam("x", Lam("x", Var("x")))
    analyze({}, e, Arrow(Num(), Arrow(THole(), THole())))
    with pytest.raises(InconsistentTypes):
        # inner binder shadows: body sees x at the inner arrow domain
        analyze({}, Lam("x", Lam("x", Plus(Var("x"), NumLit(1)))),
                Arrow(Num(), Arrow(Arrow(Num(), Num()), Num())))


def test_analysis_subsumes_synthesis_random():
    rng = random.Random(404)
    for _ in range(300):
        namer = HoleNamer()
        e = gen_synthetic(rng, {}, 4, namer)
        analyze({}, e, synthesize({}, e))


def test_synthesize_deterministic():
    rng = random.Random(405)
    for _ in range(100):
        e = gen_synthetic(rng, {}, 4, HoleNamer())
        assert synthesize({}, e) == synthesize({}, e)


def test_cursor_info_argument_hole():
    e = Ap(Asc(Lam("x", Var("x")), Arrow(Num(), Num())), EHole(0))
    info = cursor_info({}, place_cursor(e, (1,)))
    assert info.mode == "analyzed_against"
    assert info.type == Num()


def test_cursor_info_root_literal():
    info = cursor_info({}, place_cursor(NumLit(3), ()))
    assert info.mode == "synthesized"
    assert info.type == Num()


def test_cursor_info_lambda_body():
    e = Asc(Lam("x", EHole(0)), Arrow(Num(), Num()))
    info = cursor_info({}, place_cursor(e, (0, 0)))
    assert info.mode == "analyzed_against"
    assert info.type == Num()
    assert info.ctx == {"x": Num()}


def test_cursor_info_type_position():
    e = Asc(Lam("x", EHole(0)), Arrow(Num(), Num()))
    info = cursor_info({}, place_cursor(e, (1, 0)))
    assert info.mode == "type_position"
    assert info.type is None


def test_cursor_info_nehole_subject_is_synthetic():
    e = Plus(NEHole(0, Asc(Lam("x", Var("x")), Arrow(Num(), Num()))), NumLit(1))
    info = cursor_info({}, place_cursor(e, (0, 0)))
    assert info.mode == "synthesized"
    assert info.type == Arrow(Num(), Num())


def test_cursor_info_propagates_root_errors():
    z = place_cursor(Plus(Var("missing"), NumLit(1)), (1,))
    with pytest.raises(UnboundVariable):
        cursor_info({}, z)


def test_cursor_info_every_hole_has_definite_mode():
    rng = random.Random(406)
    for _ in range(200):
        z = gen_state(rng, 4, HoleNamer())
        info = cursor_info({}, z)
        assert info.mode in ("synthesized", "analyzed_against", "type_position")
        if info.mode != "type_position":
            assert info.type is not None


def test_consistency_closed_under_gen_types():
    rng = random.Random(407)
    for _ in range(200):
        t = gen_type(rng, 3)
        assert consistent(t, t)
