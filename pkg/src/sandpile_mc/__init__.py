"""Monte Carlo toolkit for Abelian sandpile height statistics on Z^d.

Simulates sandpiles on wired boxes and uniform spanning trees/forests via
Wilson's algorithm, estimates the origin's height and neighbor-degree
distributions, and checks them against the cumulative-Poisson closed form
with quantified Monte Carlo error.
"""

__version__ = "0.1.0"

from .asymptotics import (  # noqa: F401
    FormulaTable,
    bethe_p,
    bethe_table,
    formula_p,
    formula_table,
    p_from_q,
    poisson_weight,
)
from .lattice import BoxLattice, make_box  # noqa: F401
from .rng import SplitMix64  # noqa: F401
from .runner import run_partitioned  # noqa: F401
from .sandpile import (  # noqa: F401
    HeightConfig,
    all_max_stable,
    is_recurrent,
    is_stable,
    mc_step,
    sample_heights,
    stabilize,
    topple,
)
from .spanning import (  # noqa: F401
    OrientedForest,
    WDegreeSample,
    estimate_q_finite,
    estimate_q_infinite,
    path_to_root,
    w_degree,
    wilson_box,
    wilson_local_infinite,
)
from .stats import (  # noqa: F401
    ComparisonVerdict,
    EstimateTable,
    chi_square_critical,
    chi_square_uniform,
    compare,
    merge,
)
from .walk import (  # noqa: F401
    estimate_return,
    fourier_bound,
    loop_erase,
    return_frequency_at,
    run_srw,
)
