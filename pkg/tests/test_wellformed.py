from dataclasses import replace

import pytest

from lazymdp.domains import ExplDomain, make_domain
from lazymdp.pasg import Status, construct
from lazymdp.random_models import random_corpus
from lazymdp.model import with_target_command
from lazymdp.wellformed import check_well_labeled, trace_correspondence
from tests.conftest import BUNDLED, load_bundled
from tests.graphs import build_example_graph


def constraints(violations, prefix=""):
    return [v.constraint for v in violations if v.constraint.startswith(prefix)]


def test_example_graph_has_no_cover_violations(running):
    p, _, _ = build_example_graph(running)
    assert constraints(check_well_labeled(p, partial=True), "C") == []


def test_cover_inclusion_violation_is_reported_once(running):
    p, d, (n0, n1, n2, n3, n4, n5) = build_example_graph(running)
    # n3 still sits inside n2's label concretely, but its own label is now wider
    p.nodes[n3].abstract = d.top()
    found = check_well_labeled(p, partial=True)
    assert constraints(found, "C") == ["C2"]
    assert [v.nodes for v in found if v.constraint == "C2"] == [(n3, n2)]


def test_cover_containment_violation(running):
    p, d, (n0, n1, n2, n3, n4, n5) = build_example_graph(running)
    p.nodes[n2].abstract = d.make({"x": 1, "y": 0})
    assert "C1" in constraints(check_well_labeled(p, partial=True))


def test_covered_coverer_violation(running):
    p, d, (n0, n1, n2, n3, n4, n5) = build_example_graph(running)
    p.set_cover(n2, n0)
    assert "C3" in constraints(check_well_labeled(p, partial=True))


def test_duplicate_non_covered_label_violation(running):
    p = construct(running, ExplDomain(running))
    n = next(x.id for x in p.nodes if x.status is Status.COVERED
             and p.nodes[x.coverer].concrete == x.concrete)
    node = p.nodes[n]
    del p.covering[node.coverer][n]
    node.coverer = None
    node.status = Status.EXPANDED
    assert constraints(check_well_labeled(p)) == ["D1"]


def test_abstract_label_must_contain_concrete(running):
    p = construct(running, ExplDomain(running))
    p.nodes[1].abstract = p.domain.make({"x": 3})
    assert "A1" in constraints(check_well_labeled(p))


def test_undecided_guard_violation(running):
    p = construct(running, ExplDomain(running))
    p.nodes[p.root].abstract = p.domain.top()
    assert "A2" in constraints(check_well_labeled(p))


def test_edge_mutations_are_reported(running):
    p = construct(running, ExplDomain(running))
    e = p.edges[0]
    (pa, ba, ca), (pb, bb, cb) = e.branches
    p.edges[0] = replace(e, branches=((pa, ba, cb), (pb, bb, ca)))
    assert "B2" in constraints(check_well_labeled(p))
    p.edges[0] = replace(e, command=2)
    assert "B1" in constraints(check_well_labeled(p))


@pytest.mark.parametrize("name", BUNDLED)
def test_finished_bundled_graphs_correspond_to_traces(name):
    mt, _ = load_bundled(name)
    for dname in ("expl", "pred"):
        p = construct(mt, make_domain(dname, mt))
        assert all(trace_correspondence(p, k) for k in range(6))


def test_correspondence_at_depth_zero_only_needs_the_root(running):
    p = construct(running, ExplDomain(running))
    for node in p.nodes[1:]:
        node.abstract = p.domain.make({"x": 3, "y": 3})
    assert trace_correspondence(p, 0)
    assert not trace_correspondence(p, 1)


def test_correspondence_detects_wrong_child(running):
    p = construct(running, ExplDomain(running))
    assert trace_correspondence(p, 5)
    e = p.edges[0]
    (pa, ba, ca), (pb, bb, cb) = e.branches
    p.edges[0] = replace(e, branches=((pa, ba, cb), (pb, bb, ca)))
    assert not trace_correspondence(p, 5)


def test_correspondence_detects_missing_edge(running):
    p = construct(running, ExplDomain(running))
    p.nodes[p.root].edges.pop()
    assert not trace_correspondence(p, 1)


def test_corpus_graphs_correspond_to_traces():
    for _, m, q in random_corpus(20):
        mt, _ = with_target_command(m, q)
        p = construct(mt, make_domain("pred", mt))
        assert trace_correspondence(p, 4)
