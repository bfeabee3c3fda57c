"""Desk-scale toolkit for sparse graph regularity and 5-cycle removal.

Everything a certificate depends on is recomputable: copy counts are
exact integers with independent cross-check engines, cut norms are exact
below the enumeration limit and explicitly labeled lower bounds above it,
and every construction ships with the checks that certify its claims on
the instance actually built.
"""

__version__ = "0.1.0"

from .arithmetic import (
    EquationSpec,
    IntegerSet,
    additive_energy,
    behrend_avoiding,
    count_solutions,
    erdos_turan_sidon,
    greedy_avoider,
    is_sidon,
    mean_equation,
    prop17_constraints,
    sidon_equation,
)
from .certificates import (
    CountingLemmaInstance,
    random_counting_instance,
    run_counting_suite,
    verify_counting_lemma,
    verify_truncation_chain,
)
from .constructions import (
    ConstructionOutput,
    gnp,
    polarity_graph,
    prop17_graph,
    reduction_graph,
    sample_triangles,
    tensor_triangle,
    theta_hypergraph,
)
from .core import (
    BipartiteKernel,
    Graph,
    GraphParseError,
    Kernel,
    LayeredGraph,
    Partition,
    WeightedVertexSet,
    graph_to_kernel,
    read_graph,
    split_into_five,
    write_graph,
)
from .counting import (
    CountReport,
    compose,
    count_c5_labeled,
    count_c5_layered,
    count_cycles,
    cycle_product_density,
    greedy_triangle_decomposition,
    hom_cycle,
    hom_density,
    house_c4_count,
    l2sq,
    truncate_above,
)
from .cutnorm import CutNormResult, cut_norm_exact, cut_norm_lower
from .hypergraph import (
    Hypergraph,
    berge_girth_leq,
    c4free_min_degree_audit,
    has_configuration,
    min_degree_peeling_order,
    peel_min_degree,
    read_hypergraph,
    shadow_and_linearity,
    write_hypergraph,
)
from .regularity import (
    RegularityOutcome,
    average_over,
    defect_check,
    energy,
    potential,
    weak_regularity,
    weak_regularity_scaled,
)
from .removal import (
    DeletionReport,
    RemovalConfig,
    clean_reduced_c5,
    dense_pair_edges,
    greedy_c5_hitting,
    reduced_kernel,
    sparse_removal_pipeline,
)
