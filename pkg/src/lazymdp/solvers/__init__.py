from .brtdp import TraceHeuristic, brtdp, lazy_brtdp
from .bvi import bounded_value_iteration
from .graph import mec_decomposition, prob0, prob1max, view_mecs
from .result import SolveResult
from .view import MdpView, explicit_as_mdp, pasg_as_mdp

__all__ = [
    "MdpView", "SolveResult", "TraceHeuristic", "bounded_value_iteration", "brtdp",
    "explicit_as_mdp", "lazy_brtdp", "mec_decomposition", "pasg_as_mdp", "prob0",
    "prob1max", "view_mecs",
]
