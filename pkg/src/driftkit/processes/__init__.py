"""Step kernels for every simulated process, plus instance generators."""
from .coupon import CouponCollectorState, coupon_process, step_coupon
from .instances import (
    InstanceFormatError,
    find_3_coloring,
    gen_planted_2sat,
    gen_planted_3colorable,
    gen_planted_cover_graph,
    gen_random_graph,
    read_dimacs,
    read_edge_list,
    write_dimacs,
    write_edge_list,
)
from .recolour import RecolourInstance, RecolourState, recolour_process, step_recolour
from .sorting import (
    ArrayState,
    count_inversions,
    gen_adjacent_swapped,
    random_permutation_sort,
    sort_process,
    step_inversion_sort,
)
from .twosat import TwoSatFormula, TwoSatState, solve_2sat, step_two_sat, two_sat_process
from .vertex_cover import Graph, VertexCoverState, step_vertex_cover, vertex_cover_process
from .walks import (
    ONE_BARRIER,
    TWO_BARRIER,
    BarrierWalkState,
    MoranState,
    barrier_process,
    gamblers_ruin_process,
    moran_chain,
    moran_process,
    step_barrier,
    step_moran,
)
