from .common import InconsistentOracle, Prepared, prepare
from .config import LocateConfig
from .randomized import LocateResult, ProgressLog, RoundRecord, bruteforce_locate, locate_randomized
from .deterministic import DeterministicLocator, locate_deterministic, new_locator
from .tree import (DecisionTree, FixupFailure, Node, NonRedundantViolation, SizeGuardExceeded,
                   UnrealizableBranch, build_tree, depth_bound, dumps_tree, ldt_fix, loads_tree)
from .universal import (SearchExhausted, UniversalReport, VerificationTooLarge, sampled_min_fraction,
                        universal_report, universal_set, verify_universal)
