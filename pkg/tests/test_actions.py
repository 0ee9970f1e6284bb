"""Edit actions: movement, construction, deletion, finishing, macros."""

from __future__ import annotations

import random

import pytest
from generators import BINDERS, eq_mod_holes, gen_state, gen_synthetic

from hazel_kernel.actions import (
    BudgetExhausted, Child, Construct, Del, Finish, InvalidAction, Move,
    NextHole, NotWellTyped, OrElse, Parent, PrevHole, Prim, Repeat, SAp,
    SArrow, SAsc, SLam, SNEHole, SNum, SNumLit, SPlus, SVar, Seq,
    apply_action, construct_script, format_action, format_macro,
    parse_action, parse_macro, run_macro,
)
from hazel_kernel.statics import synthesize
from hazel_kernel.syntax import (
    Ap, Arrow, Asc, EHole, HoleNamer, Lam, NEHole, Num, NumLit, ParseError,
    Plus, THole, Var, ZExp, erase_cursor, hole_names, place_cursor,
)


TWO_HOLES = Plus(EHole(0), EHole(1))


# ---------------------------------------------------------------------------
# Movement


def test_move_child_and_parent():
    z = place_cursor(Lam("x", Plus(Var("x"), NumLit(1))), ())
    down = apply_action({}, z, Move(Child(0)))
    assert down.path == (0,)
    assert apply_action({}, down, Move(Parent())).path == ()


def test_move_parent_at_root_fails():
    z = place_cursor(NumLit(1), ())
    with pytest.raises(InvalidAction):
        apply_action({}, z, Move(Parent()))


def test_move_child_out_of_range_fails():
    z = place_cursor(Lam("x", EHole(0)), ())
    with pytest.raises(InvalidAction):
        apply_action({}, z, Move(Child(1)))
    with pytest.raises(InvalidAction):
        apply_action({}, place_cursor(NumLit(3), ()), Move(Child(0)))


def test_move_child_into_annotation():
    z = place_cursor(Asc(NumLit(1), Num()), ())
    ann = apply_action({}, z, Move(Child(1)))
    assert ann.path == (1,)


def test_nexthole_walks_preorder_and_wraps():
    z = place_cursor(TWO_HOLES, ())
    first = apply_action({}, z, Move(NextHole()))
    assert first.path == (0,)
    second = apply_action({}, first, Move(NextHole()))
    assert second.path == (1,)
    wrapped = apply_action({}, second, Move(NextHole()))
    assert wrapped.path == (0,)


def test_prevhole_walks_backwards_and_wraps():
    z = place_cursor(TWO_HOLES, ())
    back = apply_action({}, z, Move(PrevHole()))  # nothing before root: wrap
    assert back.path == (1,)
    assert apply_action({}, back, Move(PrevHole())).path == (0,)


def test_hole_moves_fail_without_holes():
    z = place_cursor(NumLit(3), ())
    with pytest.raises(InvalidAction):
        apply_action({}, z, Move(NextHole()))
    with pytest.raises(InvalidAction):
        apply_action({}, z, Move(PrevHole()))


def test_hole_moves_see_annotation_holes():
    # the annotation's type hole does not take part in hole navigation,
    # only expression holes do
    z = place_cursor(Asc(EHole(0), THole()), ())
    assert apply_action({}, z, Move(NextHole())).path == (0,)
    assert apply_action({}, z, Move(PrevHole())).path == (0,)


def test_movement_never_changes_erasure():
    rng = random.Random(501)
    for _ in range(80):
        z = gen_state(rng, 4, HoleNamer())
        for direction in (Child(0), Child(1), Parent(), NextHole(), PrevHole()):
            try:
                moved = apply_action({}, z, Move(direction))
            except InvalidAction:
                continue
            assert erase_cursor(moved) == erase_cursor(z)


# ---------------------------------------------------------------------------
# Construction: filling holes


def test_fill_hole_with_literal():
    z = place_cursor(EHole(0), ())
    out = apply_action({}, z, Construct(SNumLit(3)))
    assert out.root == NumLit(3)
    assert out.path == ()


def test_fill_hole_with_variable_in_scope():
    z = place_cursor(Lam("x", EHole(0)), (0,))
    out = apply_action({"f": Arrow(Num(), Num())},
                       ZExp(Asc(z.root, Arrow(Num(), Num())), (0, 0)),
                       Construct(SVar("x")))
    assert out.root == Asc(Lam("x", Var("x")), Arrow(Num(), Num()))


def test_fill_hole_with_unbound_variable_fails():
    z = place_cursor(EHole(0), ())
    with pytest.raises(InvalidAction):
        apply_action({}, z, Construct(SVar("ghost")))


def test_leaf_shapes_require_an_empty_hole():
    z = place_cursor(NumLit(1), ())
    for shape in (SNumLit(2), SVar("x"), SLam("x")):
        with pytest.raises(InvalidAction):
            apply_action({"x": Num()}, z, Construct(shape))


def test_inconsistent_literal_lands_inside_a_mark():
    # filling a hole analyzed against an arrow: the literal cannot fit,
    # so it arrives wrapped in a non-empty hole with the cursor on it
    z = place_cursor(Asc(EHole(0), Arrow(Num(), Num())), (0,))
    out = apply_action({}, z, Construct(SNumLit(3)))
    assert out.root == Asc(NEHole(1, NumLit(3)), Arrow(Num(), Num()))
    assert out.path == (0, 0)
    synthesize({}, out.root)


def test_lambda_against_matched_arrow_is_bare():
    z = place_cursor(Asc(EHole(0), Arrow(Num(), Num())), (0,))
    out = apply_action({}, z, Construct(SLam("x")))
    assert out.root == Asc(Lam("x", EHole(1)), Arrow(Num(), Num()))
    assert out.path == (0, 0)  # cursor on the body hole


def test_lambda_against_num_is_marked_and_ascribed():
    z = place_cursor(Asc(EHole(0), Num()), (0,))
    out = apply_action({}, z, Construct(SLam("x")))
    assert out.root == Asc(
        NEHole(2, Asc(Lam("x", EHole(1)), THole())), Num())
    assert out.path == (0, 0, 0, 0)  # cursor on the body hole
    synthesize({}, out.root)


def test_lambda_in_synthetic_position_announces_an_arrow():
    z = place_cursor(EHole(0), ())
    out = apply_action({}, z, Construct(SLam("x")))
    assert out.root == Asc(Lam("x", EHole(1)), Arrow(THole(), THole()))
    assert out.path == (0, 0)


def test_apply_on_non_function_marks_the_head():
    z = place_cursor(NumLit(3), ())
    out = apply_action({}, z, Construct(SAp()))
    assert out.root == Ap(NEHole(0, NumLit(3)), EHole(1))
    assert out.path == (1,)  # cursor on the fresh argument hole
    synthesize({}, out.root)


def test_apply_on_function_keeps_the_head():
    fn = Asc(Lam("x", Var("x")), Arrow(Num(), Num()))
    out = apply_action({}, place_cursor(fn, ()), Construct(SAp()))
    assert out.root == Ap(fn, EHole(0))
    assert out.path == (1,)


def test_apply_on_bare_lambda_ascribes_the_head():
    z = place_cursor(Asc(Lam("x", EHole(0)), THole()), (0,))
    out = apply_action({}, z, Construct(SAp()))
    assert out.root == Asc(
        Ap(Asc(Lam("x", EHole(0)), THole()), EHole(1)), THole())
    assert out.path == (0, 1)


def test_plus_keeps_a_numeric_left_operand():
    z = place_cursor(NumLit(1), ())
    out = apply_action({}, z, Construct(SPlus()))
    assert out.root == Plus(NumLit(1), EHole(0))
    assert out.path == (1,)


def test_plus_marks_a_non_numeric_left_operand():
    ctx = {"f": Arrow(Num(), Num())}
    out = apply_action(ctx, place_cursor(Var("f"), ()), Construct(SPlus()))
    assert out.root == Plus(NEHole(0, Var("f")), EHole(1))
    assert out.path == (1,)
    synthesize(ctx, out.root)


def test_ascription_wraps_and_moves_to_the_annotation():
    z = place_cursor(NumLit(3), ())
    out = apply_action({}, z, Construct(SAsc()))
    assert out.root == Asc(NumLit(3), THole())
    assert out.path == (1,)


def test_nehole_wraps_the_cursor_node():
    out = apply_action({}, place_cursor(NumLit(3), ()), Construct(SNEHole()))
    assert out.root == NEHole(0, NumLit(3))
    assert out.path == ()


def test_nehole_on_bare_lambda_ascribes_the_subject():
    z = place_cursor(Asc(Lam("x", EHole(0)), THole()), (0,))
    out = apply_action({}, z, Construct(SNEHole()))
    assert out.root == Asc(
        NEHole(1, Asc(Lam("x", EHole(0)), THole())), THole())
    assert out.path == (0,)
    synthesize({}, out.root)


def test_construction_wraps_when_candidate_breaks_the_goal():
    # Plus synthesizes Num, but the position wants an arrow
    z = place_cursor(Asc(EHole(0), Arrow(Num(), Num())), (0,))
    out = apply_action({}, z, Construct(SPlus()))
    assert out.root == Asc(
        NEHole(2, Plus(EHole(0), EHole(1))), Arrow(Num(), Num()))
    assert out.path == (0, 0, 1)
    synthesize({}, out.root)


# ---------------------------------------------------------------------------
# Construction: type position


def test_type_shapes_need_type_position():
    z = place_cursor(EHole(0), ())
    for shape in (SNum(), SArrow()):
        with pytest.raises(InvalidAction):
            apply_action({}, z, Construct(shape))


def test_expression_shapes_rejected_in_type_position():
    z = place_cursor(Asc(NumLit(1), THole()), (1,))
    for shape in (SNumLit(1), SAsc(), SAp(), SPlus(), SNEHole()):
        with pytest.raises(InvalidAction):
            apply_action({}, z, Construct(shape))


def test_construct_num_type():
    z = place_cursor(Asc(NumLit(1), THole()), (1,))
    out = apply_action({}, z, Construct(SNum()))
    assert out.root == Asc(NumLit(1), Num())
    assert out.path == (1,)


def test_construct_arrow_wraps_domain_moves_to_codomain():
    z = place_cursor(Asc(Lam("x", EHole(0)), THole()), (1,))
    out = apply_action({}, z, Construct(SArrow()))
    assert out.root == Asc(Lam("x", EHole(0)), Arrow(THole(), THole()))
    assert out.path == (1, 1)


def test_type_edit_that_breaks_the_subject_fails():
    # turning a literal's annotation into an arrow would orphan the literal
    z = place_cursor(Asc(NumLit(1), Num()), (1,))
    with pytest.raises(InvalidAction):
        apply_action({}, z, Construct(SArrow()))


# ---------------------------------------------------------------------------
# Del


def test_del_leaves_a_fresh_hole():
    z = place_cursor(Plus(NumLit(1), NumLit(2)), (0,))
    out = apply_action({}, z, Del())
    assert out.root == Plus(EHole(0), NumLit(2))
    assert out.path == (0,)


def test_del_fresh_name_avoids_existing_ones():
    z = place_cursor(Plus(EHole(7), NumLit(2)), (1,))
    out = apply_action({}, z, Del())
    assert out.root == Plus(EHole(7), EHole(8))


def test_del_in_type_position_leaves_a_type_hole():
    z = place_cursor(Asc(Lam("x", Var("x")), Arrow(Num(), Num())), (1,))
    out = apply_action({}, z, Del())
    assert out.root == Asc(Lam("x", Var("x")), THole())
    assert out.path == (1,)


# ---------------------------------------------------------------------------
# Finish


def test_finish_discharges_a_consistent_mark():
    z = place_cursor(Asc(NEHole(1, NumLit(3)), Num()), (0,))
    out = apply_action({}, z, Finish())
    assert out.root == Asc(NumLit(3), Num())
    assert out.path == (0,)


def test_finish_keeps_an_inconsistent_mark():
    z = place_cursor(Asc(NEHole(1, NumLit(3)), Arrow(Num(), Num())), (0,))
    with pytest.raises(InvalidAction):
        apply_action({}, z, Finish())


def test_finish_requires_a_synthesizing_subject():
    # a bare lambda would analyze against the hole type, but the mark is
    # only discharged on a subject that synthesizes
    z = place_cursor(Asc(NEHole(1, Lam("x", Var("x"))), THole()), (0,))
    with pytest.raises(InvalidAction):
        apply_action({}, z, Finish())


def test_finish_elsewhere_fails():
    with pytest.raises(InvalidAction):
        apply_action({}, place_cursor(NumLit(3), ()), Finish())


def test_finish_checks_the_enclosing_position():
    # discharging the head would leave a literal applied as a function
    z = place_cursor(Ap(NEHole(0, NumLit(3)), EHole(1)), (0,))
    with pytest.raises(InvalidAction):
        apply_action({}, z, Finish())


# ---------------------------------------------------------------------------
# Sensibility, determinism, atomicity


def _action_pool(rng):
    return [
        Move(Child(rng.randrange(2))), Move(Parent()),
        Move(NextHole()), Move(PrevHole()),
        Del(), Finish(),
        Construct(SAsc()), Construct(SAp()), Construct(SPlus()),
        Construct(SNEHole()), Construct(SNumLit(rng.randrange(3))),
        Construct(SVar(rng.choice(BINDERS))),
        Construct(SLam(rng.choice(BINDERS))),
        Construct(SArrow()), Construct(SNum()),
    ]


def test_successful_actions_keep_states_meaningful():
    rng = random.Random(502)
    hits = 0
    for _ in range(250):
        z = gen_state(rng, 4, HoleNamer())
        snapshot = z
        for a in _action_pool(rng):
            try:
                out = apply_action({}, z, a)
            except InvalidAction:
                assert z == snapshot  # failure leaves the state alone
                continue
            hits += 1
            synthesize({}, out.root)
    assert hits > 300


def test_edit_position_mode_is_stable():
    # replacing the subtree at the cursor cannot change how the position
    # itself is typed: ancestors determine the mode
    from hazel_kernel.statics import cursor_info
    rng = random.Random(503)
    for _ in range(120):
        z = gen_state(rng, 4, HoleNamer())
        before = cursor_info({}, z)
        for a in _action_pool(rng):
            if isinstance(a, Move):
                continue
            try:
                out = apply_action({}, z, a)
            except InvalidAction:
                continue
            after = cursor_info({}, ZExp(out.root, z.path))
            if before.mode == "analyzed_against":
                assert after.mode == "analyzed_against"
                assert after.type == before.type


def test_application_is_deterministic():
    rng = random.Random(504)
    for _ in range(60):
        z = gen_state(rng, 4, HoleNamer())
        for a in _action_pool(rng):
            try:
                first = apply_action({}, z, a)
            except InvalidAction:
                first = None
            try:
                second = apply_action({}, z, a)
            except InvalidAction:
                second = None
            assert first == second


def test_explicit_namer_is_respected():
    namer = HoleNamer(40)
    out = apply_action({}, place_cursor(EHole(0), ()), Construct(SAp()), namer)
    assert hole_names(out.root) == {0, 40}
    assert namer.next_name == 41


# ---------------------------------------------------------------------------
# Macros


def test_macro_single_nexthole():
    z = place_cursor(TWO_HOLES, ())
    out, trace = run_macro({}, z, Prim(Move(NextHole())))
    assert out.path == (0,)
    assert trace == [Move(NextHole())]


def test_repeat_nexthole_stops_before_cycling():
    z = place_cursor(TWO_HOLES, ())
    out, trace = run_macro({}, z, Repeat(Prim(Move(NextHole()))))
    assert out.path == (1,)  # third step would wrap back to the first hole
    assert len(trace) == 2


def test_repeat_of_failing_body_is_a_noop():
    z = place_cursor(NumLit(3), ())
    out, trace = run_macro({}, z, Repeat(Prim(Move(NextHole()))))
    assert out == z and trace == []


def test_orelse_prefers_the_first_branch():
    z = place_cursor(Asc(NEHole(1, NumLit(3)), Num()), (0,))
    macro = OrElse(Prim(Finish()), Prim(Move(Parent())))
    out, trace = run_macro({}, z, macro)
    assert out.root == Asc(NumLit(3), Num())
    assert trace == [Finish()]


def test_orelse_falls_back_from_the_original_state():
    z = place_cursor(Asc(NumLit(3), Num()), (0,))  # no mark: Finish fails
    macro = OrElse(Prim(Finish()), Prim(Move(Parent())))
    out, trace = run_macro({}, z, macro)
    assert out.path == ()
    assert trace == [Move(Parent())]


def test_seq_threads_state():
    z = place_cursor(EHole(0), ())
    macro = Seq(Prim(Construct(SPlus())), Prim(Construct(SNumLit(2))))
    out, _ = run_macro({}, z, macro)
    assert out.root == Plus(EHole(0), NumLit(2))


def test_macro_failure_propagates():
    z = place_cursor(NumLit(3), ())
    with pytest.raises(InvalidAction):
        run_macro({}, z, Seq(Prim(Move(Parent())), Prim(Del())))


def test_budget_stops_runaway_macros():
    # each iteration buries the hole under one more mark: never revisits
    grower = Seq(Prim(Construct(SNEHole())), Prim(Move(Child(0))))
    z = place_cursor(EHole(0), ())
    with pytest.raises(BudgetExhausted):
        run_macro({}, z, Repeat(grower), budget=10)


def test_macro_trace_replays_to_the_same_state():
    rng = random.Random(505)
    macro = Repeat(OrElse(Prim(Construct(SNumLit(1))), Prim(Move(NextHole()))))
    for _ in range(40):
        z = gen_state(rng, 4, HoleNamer())
        top = max(hole_names(z.root), default=-1) + 1
        out, trace = run_macro({}, z, macro, namer=HoleNamer(top))
        replayed = z
        replay_namer = HoleNamer(top)
        for a in trace:
            replayed = apply_action({}, replayed, a, replay_namer)
        assert replayed == out


# ---------------------------------------------------------------------------
# Text encodings


def test_action_text_round_trip():
    rng = random.Random(506)
    texts = [
        "move child 0", "move child 1", "move parent", "move nexthole",
        "move prevhole", "construct asc", "construct var x",
        "construct lam y", "construct ap", "construct num 3",
        "construct num -7", "construct plus", "construct nehole",
        "construct arrow", "construct numtype", "del", "finish",
    ]
    for text in texts:
        assert format_action(parse_action(text)) == text
    for a in _action_pool(rng):
        assert parse_action(format_action(a)) == a


def test_bad_action_text_rejected():
    for text in ("", "move", "move sideways", "construct", "construct num x",
                 "construct var 9lives", "finish now"):
        with pytest.raises(ParseError):
            parse_action(text)


def test_macro_text_round_trip():
    m = Repeat(OrElse(Prim(Finish()), Seq(Prim(Move(NextHole())),
                                          Prim(Construct(SNumLit(0))))))
    assert parse_macro(format_macro(m)) == m
    assert parse_macro("(repeat (prim move nexthole))") == \
        Repeat(Prim(Move(NextHole())))


def test_bad_macro_text_rejected():
    for text in ("", "(loop (prim del))", "(prim)", "(seq (prim del))",
                 "(prim del) extra"):
        with pytest.raises(ParseError):
            parse_macro(text)


# ---------------------------------------------------------------------------
# Expressivity


def _replay(script):
    namer = HoleNamer()
    z = ZExp(EHole(namer.fresh()), ())
    for a in script:
        z = apply_action({}, z, a, namer)
    return z


def test_script_for_a_literal():
    assert construct_script(NumLit(3)) == [Construct(SNumLit(3))]


def test_script_for_the_ascribed_identity():
    e = Asc(Lam("x", Var("x")), Arrow(Num(), Num()))
    z = _replay(construct_script(e))
    assert erase_cursor(z) == e  # hole-free, so equal on the nose


def test_script_rebuilds_holes_up_to_naming():
    e = Ap(NEHole(3, NumLit(1)), Plus(EHole(7), NumLit(2)))
    synthesize({}, e)
    z = _replay(construct_script(e))
    assert eq_mod_holes(erase_cursor(z), e)


def test_script_requires_well_typed_input():
    with pytest.raises(NotWellTyped):
        construct_script(Var("loose"))
    with pytest.raises(NotWellTyped):
        construct_script(Lam("x", Var("x")))  # bare lambda cannot synthesize


def test_scripts_replay_on_random_terms():
    rng = random.Random(507)
    namer = HoleNamer()
    for _ in range(80):
        e = gen_synthetic(rng, {}, rng.randrange(1, 6), namer)
        z = _replay(construct_script(e))
        assert eq_mod_holes(erase_cursor(z), e)
