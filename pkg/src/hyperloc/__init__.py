"""Point location in hyperplane arrangements using generalized comparison queries."""

from .forster import (ConvergenceFailure, DimensionTooFew, ForsterCertificate, apply_certificate,
                      forster_transform, identity_certificate, scaled_originals)
from .inference import (UNKNOWN, InfeasibleConditions, NodeLimitExceeded, SignCondition, cone_feasible,
                        enumerate_patterns, infer, infer_comp)
from .ldt import (DecisionTree, LocateConfig, bruteforce_locate, build_tree, ldt_fix, locate_deterministic,
                  locate_randomized, universal_set, verify_universal)
from .linalg import IsotropyReport, NotPositiveDefinite, inv_sqrt, isotropy_report, min_eigenvalue, second_moment
from .oracle import (NONE, GenComparisonQuery, PointOracle, QueryTranscript, ZeroQuery, ask, make_query,
                     sort_by_inner_product)

__version__ = "0.1.0"
