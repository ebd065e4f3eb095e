"""Certificates of unboundedness for polynomial optimization problems."""

__version__ = "0.1.0"

from .asymptotics import (  # noqa: E402
    AsymptoticSign,
    DirectionalProfile,
    SignKind,
    Tolerance,
    certificate_check,
    classify,
    witness_threshold,
)
from .certify import Inconclusive, Robustness, Unbounded, classify_robustness, run_certificate  # noqa: E402
from .errors import CertifyError, ContractError, InputError, ParseError, ResourceError  # noqa: E402
from .oracle import GridSpec, grid_alpha, verify_ray  # noqa: E402
from .parser import Problem, load_problem, parse_expression, parse_problem  # noqa: E402
from .polynomial import (  # noqa: E402
    HomogeneousDecomposition,
    Monomial,
    Polynomial,
    decompose,
    evaluate,
    gradient,
    restrict_to_ray,
)
from .probe import ProbeConfig, find_candidates, penalty  # noqa: E402
from .sampling import (  # noqa: E402
    SampleConfig,
    estimate_alpha,
    required_samples,
    residual_probability,
    sample_direction,
)
