from fractions import Fraction

from lazymdp.domains import ExplDomain
from lazymdp.pasg import Pasg


def build_example_graph(running):
    """The partial graph of the running example with labels tracking only x:
    n0 covers n1, n2 covers n3 and n4, n5 is waiting."""
    d = ExplDomain(running)
    p = Pasg(running, d)
    p.waitlist.clear()
    v = running.valuation
    p.nodes[0].abstract = d.make({"x": 0})
    n1 = p.new_node(v({"x": 0, "y": 0}), d.make({"x": 0}), (0, 1))
    n2 = p.new_node(v({"x": 1, "y": 0}), d.make({"x": 1}), (0, 0))
    p.add_edge(0, 0, [(Fraction(4, 5), 0, n2), (Fraction(1, 5), 1, n1)])
    n3 = p.new_node(v({"x": 1, "y": 2}), d.make({"x": 1}), (1, 0))
    p.add_edge(0, 1, [(Fraction(1), 0, n3)])
    p.mark_expanded(0)
    n5 = p.new_node(v({"x": 2, "y": 0}), d.make({"x": 2}), (2, 0))
    n4 = p.new_node(v({"x": 1, "y": 0}), d.make({"x": 1}), (2, 1))
    p.add_edge(n2, 0, [(Fraction(4, 5), 0, n5), (Fraction(1, 5), 1, n4)])
    p.mark_expanded(n2)
    p.set_cover(n1, 0)
    p.set_cover(n3, n2)
    p.set_cover(n4, n2)
    return p, d, (0, n1, n2, n3, n4, n5)
