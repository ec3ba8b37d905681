"""Hat-guessing strategies on graphs: constructions, verifiers, and the
finite lemma checks behind them."""

from .errors import (
    CertificateError,
    HatLabError,
    InfeasibleError,
    ParameterError,
    PartitionConditionError,
)
from .game import (
    Graph,
    SearchOutcome,
    SolvableSet,
    Strategy,
    VerificationReport,
    build_graph,
    complete_sum_strategy,
    correct_guess_counts,
    custom_graph,
    max_solvable_set_search,
    minimum_vertex_cover_size,
    read_assignment_set,
    read_strategy_file,
    search_strategy,
    solvable_interval_set,
    strategy_guesses,
    subgraph_lift,
    sum_target_strategy,
    verify_strategy,
    vertex_cover_bound,
    write_assignment_set,
    write_strategy_file,
)
from .cover import (
    AxisPartition,
    CoverSweepReport,
    HallViolator,
    PointSet,
    canonicalize,
    coverability_sweep,
    coverable,
    coverable_bruteforce,
    loomis_whitney_check,
    noncoverable_construction,
    numerically_coverable,
    projection,
    read_point_set,
    write_point_set,
)
from .cube import (
    CUBE_MASKS,
    PartitionTuple,
    check_partition_condition,
    cube_mask,
    cube_pair_overlap,
    cube_triple_overlap,
    cube_triple_two_intersection_size,
    four_cubes_two_intersection_sweep,
    grid_cube_masks,
    hamming_ball,
    k22_certificate_search,
    prism_cover_impossible,
    read_partition_file,
    square_two_intersection_minima,
    strategy_from_bipartite_partitions,
    three_cubes_min_two_intersection,
    two_intersection,
    write_partition_file,
)
from .windmill import (
    BladePiece,
    DifferenceDisjointFamily,
    ParitySet,
    ProductCertificate,
    ResidueSet,
    assemble_windmill_strategy,
    certificate_blade_check,
    certificate_disjointness_check,
    certificate_random_loss_check,
    counting_inequality_check,
    difference_disjoint_family,
    is_difference_disjoint,
    parity_counting_check,
    parity_set,
    parity_set_strategy,
    product_certificate_parity,
    product_certificate_residue,
    read_certificate_file,
    residue_counting_check,
    sum_avoid_set,
    translate_intersection_max,
    windmill_guesses,
    write_certificate_file,
)

__version__ = "0.1.0"
