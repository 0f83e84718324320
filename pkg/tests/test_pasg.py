from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lazymdp.domains import ExplDomain, PredDomain, make_domain
from lazymdp.errors import BudgetExceeded, ContractError, OutOfRangeError
from lazymdp.expr import FALSE, TRUE, Cmp, Const, Var
from lazymdp.model import ReachabilityQuery, VarDecl, command, make_model, with_target_command
from lazymdp.pasg import Pasg, Status, construct
from lazymdp.random_models import random_model
from lazymdp.solvers import bounded_value_iteration, pasg_as_mdp
from lazymdp.wellformed import check_well_labeled
from tests.conftest import BUNDLED, load_bundled
from tests.graphs import build_example_graph

X, Y = Var("x"), Var("y")


def pmax(pasg):
    r = bounded_value_iteration(pasg_as_mdp(pasg), 1e-9)
    return (r.lower + r.upper) / 2


def test_running_example_value(running):
    p = construct(running, ExplDomain(running))
    assert p.finished and p.frozen
    assert pmax(p) == pytest.approx(1.0, abs=1e-6)
    assert p.nodes[p.root].concrete == running.initial


def test_root_expansion_creates_three_children(running):
    p = Pasg(running, ExplDomain(running))
    p.expand(p.pop_waiting())
    root = p.nodes[p.root]
    shapes = [(p.edges[e].command, [b[0] for b in p.edges[e].branches]) for e in root.edges]
    assert shapes == [(0, [Fraction(4, 5), Fraction(1, 5)]), (1, [Fraction(1)])]
    assert len(p.nodes) == 4
    assert [p.nodes[c].concrete for _, _, c in p.edges[root.edges[0]].branches] == [
        running.valuation({"x": 1, "y": 0}), running.valuation({"x": 0, "y": 0})
    ]


def test_self_loop_child_is_covered_by_root(running):
    # the 1/5 branch of c1 repeats the initial state, which the root covers
    p = construct(running, ExplDomain(running))
    child = p.edges[p.nodes[p.root].edges[0]].branches[1][2]
    assert p.nodes[child].status is Status.COVERED
    assert p.nodes[child].coverer == p.root


def test_unsatisfiable_target():
    m = make_model([VarDecl("x", "int", 0, 2, 0)], [command(Cmp("<", X, Const(2)), (1, {"x": Const(1)}))])
    mt, _ = with_target_command(m, ReachabilityQuery(FALSE))
    p = construct(mt, ExplDomain(mt))
    assert not any(n.is_target for n in p.nodes)
    assert pmax(p) == 0.0


def test_single_state_target():
    m = make_model([VarDecl("x", "int", 0, 1, 0)], [command(TRUE, (1, {}))])
    mt, _ = with_target_command(m, ReachabilityQuery(Cmp("==", X, Const(0))))
    p = construct(mt, ExplDomain(mt))
    assert p.nodes[p.root].is_target
    assert pmax(p) == 1.0


def test_deadlock_node_has_no_edges():
    m = make_model([VarDecl("x", "int", 0, 1, 0)], [command(Cmp("==", X, Const(1)), (1, {}))])
    mt, _ = with_target_command(m, ReachabilityQuery(Cmp("==", X, Const(1))))
    p = construct(mt, ExplDomain(mt))
    assert len(p.nodes) == 1
    assert p.nodes[p.root].status is Status.EXPANDED and p.nodes[p.root].edges == []
    assert pmax(p) == 0.0


def test_duplicate_paths_leave_one_non_covered_node():
    # x=2 is reachable through x=1 (first branch) and directly (second branch)
    m = make_model(
        [VarDecl("x", "int", 0, 2, 0)],
        [
            command(Cmp("==", X, Const(0)), (Fraction(1, 2), {"x": 1}), (Fraction(1, 2), {"x": 2})),
            command(Cmp("==", X, Const(1)), (1, {"x": 2})),
        ],
    )
    mt, _ = with_target_command(m, ReachabilityQuery(Cmp("==", X, Const(2))))
    for domain in (ExplDomain(mt), PredDomain(mt)):
        p = construct(mt, domain)
        twos = [n for n in p.nodes if n.concrete["x"] == 2]
        assert len(twos) >= 2
        assert sum(1 for n in twos if n.status is not Status.COVERED) == 1
        assert check_well_labeled(p) == []


def test_example_graph_covers(running):
    p, d, (n0, n1, n2, n3, n4, n5) = build_example_graph(running)
    assert set(p.cover_edges()) == {(n1, n0), (n3, n2), (n4, n2)}
    # the only violations of the unfinished graph come from the target command,
    # whose guard y == 3 the x-only labels cannot decide
    found = {v.constraint for v in check_well_labeled(p, partial=True)}
    assert found <= {"A2"}


def test_refinement_cascade_of_the_example(running):
    p, d, (n0, n1, n2, n3, n4, n5) = build_example_graph(running)
    p.expand(n5)
    assert p.nodes[n5].abstract == d.make({"x": 2, "y": 0})
    assert p.nodes[n2].abstract == d.make({"x": 1, "y": 0})
    # n3 (y=2) no longer fits n2's label and goes back to the waitlist
    assert p.nodes[n3].status is Status.WAITING and p.nodes[n3].coverer is None
    assert n3 in p.waitlist
    # covers that survive strengthen the covered nodes too
    assert p.nodes[n4].coverer == n2 and p.nodes[n4].abstract == d.make({"x": 1, "y": 0})
    assert p.nodes[n0].abstract == d.make({"x": 0, "y": 0})
    assert p.nodes[n1].abstract == d.make({"x": 0, "y": 0})


def test_block_precondition_is_checked(running):
    p = Pasg(running, ExplDomain(running))
    with pytest.raises(ContractError):
        p.block(p.root, Cmp("==", X, Const(0)))


def test_block_with_false_is_a_no_op(running):
    p = Pasg(running, ExplDomain(running))
    before = p.nodes[p.root].abstract
    p.block(p.root, FALSE)
    assert p.nodes[p.root].abstract == before and p.block_count == 0


def test_finished_graph_is_frozen(running):
    p = construct(running, ExplDomain(running))
    with pytest.raises(ContractError):
        p.block(p.root, FALSE)


def test_node_budget():
    mt, _ = load_bundled("irrelevant_variable")
    with pytest.raises(BudgetExceeded) as info:
        construct(mt, ExplDomain(mt), max_nodes=30)
    assert isinstance(info.value.partial, Pasg)
    assert len(info.value.partial.nodes) == 30


def test_out_of_range_names_command_and_state():
    m = make_model([VarDecl("x", "int", 0, 1, 0)], [command(TRUE, (1, {"x": 5}))])
    mt, _ = with_target_command(m, ReachabilityQuery(Cmp("==", X, Const(1))))
    with pytest.raises(OutOfRangeError, match="command 0, branch 0"):
        construct(mt, ExplDomain(mt))


def test_requires_target_command(running):
    from lazymdp.parser import load_model
    from tests.conftest import bundled_path

    m, _ = load_model(bundled_path("coin"))
    with pytest.raises(ContractError):
        Pasg(m, ExplDomain(m))


@pytest.mark.parametrize("name", BUNDLED)
@pytest.mark.parametrize("policy", ["lifo", "fifo"])
def test_structure_of_finished_graphs(name, policy):
    mt, _ = load_bundled(name)
    for dname in ("expl", "pred"):
        p = construct(mt, make_domain(dname, mt), policy)
        for node in p.nodes:
            assert node.status in (Status.COVERED, Status.EXPANDED)
            if node.status is Status.COVERED:
                assert node.edges == []
                assert p.nodes[node.coverer].status is Status.EXPANDED
        children = [c for e in p.edges for _, _, c in e.branches]
        assert sorted(children) == list(range(1, len(p.nodes)))
        assert check_well_labeled(p) == []


def test_dump_lists_nodes_edges_and_covers(running):
    p = construct(running, ExplDomain(running))
    text = p.dump()
    lines = text.splitlines()
    assert sum(l.startswith("node ") for l in lines) == len(p.nodes)
    assert sum(l.startswith("edge ") for l in lines) == len(p.edges)
    assert sum(l.startswith("cover ") for l in lines) == p.counts()[1]
    assert "lc={x=0, y=0}" in lines[0]


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6), st.sampled_from(["expl", "pred"]), st.sampled_from(["lifo", "fifo"]))
def test_construction_is_well_labeled_at_every_step(seed, dname, policy):
    m, q = random_model(seed)
    mt, _ = with_target_command(m, q)
    problems = []
    p = construct(
        mt, make_domain(dname, mt), policy,
        on_iteration=lambda g: problems.extend(check_well_labeled(g, partial=True)),
    )
    assert problems == []
    assert check_well_labeled(p) == []
