
from anthill.common.options import define

# Iteration

define("r",
       default=0.81,
       help="Contraction ratio of the defect tolerances, eps_n = r^n * eps_0. Must lie in (1/2, 1).",
       group="iteration",
       type=float)

define("defect_tol",
       default=1e-8,
       help="The iteration stops at the first level eps_n below this tolerance",
       group="iteration",
       type=float)

define("max_iter",
       default=500,
       help="Maximum number of defect-reduction steps before a partial certificate is issued",
       group="iteration",
       type=int)

define("mode",
       default="exact",
       help="Phase construction: exact (conjugate phases) or faithful (quantized phases)",
       group="iteration",
       type=str)

define("arcs",
       default=0,
       help="Arc count of the circle partition in faithful mode (0 derives it from the tolerance)",
       group="iteration",
       type=int)

define("selection",
       default="peak",
       help="Row picked by a reduction step: peak (largest variation) or first (lowest admissible index)",
       group="iteration",
       type=str)

define("shortcut",
       default=True,
       help="Stop as soon as the defect is below the terminal level instead of stepping down to it",
       group="iteration",
       type=bool)

# Oracles

define("dual_grid",
       default=720,
       help="Phase grid of the brute-force dual supremum oracle",
       group="oracle",
       type=int)

# Instance generator

define("k_size",
       default=4,
       help="Number of points of K in generated instances",
       group="generator",
       type=int)

define("s_size",
       default=4,
       help="Number of points of S in generated instances",
       group="generator",
       type=int)

define("norm_scale",
       default=1.0,
       help="Operator norm the generated instances are scaled to",
       group="generator",
       type=float)

# Sweep

define("sweep_workers",
       default=1,
       help="Executor threads used by the sweep",
       group="sweep",
       type=int)
