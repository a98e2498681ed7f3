"""
Rank gradient, combinatorial cost and homology torsion of finite quotients of
right-angled groups, computed exactly on Schreier graphs.
"""

from .farber import FixedPointReport, fixed_point_fraction, gamma_sum
from .groupoid import (
    CorrectionSet, LabeledRewiring, RankBound, abelian_rank_lower_bound, correction_set,
    label_rewiring, rank_upper_bound,
)
from .groups import (
    FAMILIES, GeneratorChain, GroupInstance, PermutationAction, RightAngledCertificate,
    act_word, commutator, evaluate_word, heisenberg_group, invert_word, make_action,
    make_family, sl3_group, torus_group, verify_right_angled,
)
from .homology import (
    SnfResult, SparseIntegerMatrix, SubgroupPresentation, abelianized_matrix,
    check_presentation, hadamard_bound, homology, log_int, rewired_complex,
    schreier_presentation, smith_normal_form, torsion_growth_stat, within_hadamard,
)
from .rewire import (
    UNBOUNDED, CycleDecomposition, RewiringResult, bilipschitz_distance, build_rewiring,
    cycle_decomposition, edge_density, separated_positions,
)
from .schreier import (
    BallCode, BallTooLarge, LabeledSchreierGraph, ball_code, build_schreier, cayley_ball,
    enumerate_ball, exceptional_vertices, is_connected,
)

__version__ = "0.1.0"
