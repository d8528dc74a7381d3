"""Non-adaptive group testing by binary splitting."""

from .decoder import DecodeResult, decode, exhaustive_consistent
from .design import ExplicitAssignment, TestAssignment, build_explicit_assignment
from .gf import Gf2mField, PolyHash, field_new, gf_mul, hash_eval, hash_new, verify_rwise
from .hashed import HashAssignment, build_hash_assignment, default_r
from .outcomes import Outcomes, simulate_fast, simulate_naive
from .params import ProblemParams, TreeNode, ancestor_node, group_of, new_params, num_tests
from .saffron import SaffronDesign, build_saffron, saffron_decode, simulate_saffron

__version__ = "0.1.0"
