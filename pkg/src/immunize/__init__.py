"""Community-based network immunization with spectral baselines and an ICM simulator."""

from .baselines import ShieldSelection, budget_search, netshield, sparseshield
from .contain import (
    ComposedSubgraph,
    RankedCommunities,
    compose_seed_subgraph,
    contain,
    immunized_node_set,
)
from .errors import ConvergenceError, DomainError, ImmunizeError, ParseError
from .generators import gnm, planted_partition, sample_seeds
from .graph import (
    Graph,
    connected_components,
    induced_subgraph,
    load_edge_list,
    load_node_set,
    neighborhood,
)
from .icm import CascadeConfig, SpreadEstimate, saved_nodes, simulate
from .louvain import Partition, delta_q, louvain, modularity
from .spectral import EigenPair, dominant_eigenpair
from .structural import component_constraint_profile, node_constraint, tie_proportions

__version__ = "0.1.0"
