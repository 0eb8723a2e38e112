"""Minimum s-t cuts in hypergraphs with edge-dependent vertex weights.

Splitting functions of the form ``w_e(S) = g(gamma_e(S))`` with concave
``g`` are reduced to directed graph gadgets (exactly, or within a factor
``1 + eps`` after piecewise-linear sparsification) and solved with a
push-relabel max-flow.
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .hypergraph import (  # noqa: F401
    Hyperedge,
    Hypergraph,
    build_hypergraph,
    format_hypergraph,
    gamma_sum,
    parse_hypergraph,
    read_hypergraph,
)
from .splitting import (  # noqa: F401
    Family,
    SplittingSpec,
    eval_split,
    hypergraph_cut,
    is_submodular_bruteforce,
    parse_spec,
)
from .network import INF, FlowNetwork, format_network, parse_network  # noqa: F401
from .sparsify import (  # noqa: F401
    PiecewiseLinear,
    eval_pwl,
    pwl_to_gadget_params,
    sparsify_continuous,
    sparsify_discrete,
    verify_approximation,
)
from .reduction import (  # noqa: F401
    GadgetCombination,
    enumerate_Qa,
    enumerate_Qs,
    expand_asym,
    expand_clique,
    expand_lawler,
    expand_star,
    expand_sym,
    gadget_split_value,
    reduce_asymmetric,
    reduce_hypergraph,
    reduce_symmetric,
)
from .flownet import (  # noqa: F401
    CutResult,
    ProjectedCut,
    attach_terminals,
    brute_force_min_cut,
    hypergraph_min_st_cut,
    max_flow_min_cut,
)
