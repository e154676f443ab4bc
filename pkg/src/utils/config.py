"""
Configuration settings for the spectral-colorings toolkit.
"""

import os
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional, Tuple

# Numerical tolerances
IDENTITY_TOL = 1e-12  # absolute tolerance for exact-count identities
INEQUALITY_SLACK = 1e-9  # slack added to the right-hand side of inequality checks
SPECTRAL_TOL = 1e-8  # eigenvalue identity and multiplicity clustering
IMAG_TOL = 1e-8  # largest admissible imaginary part of an eigenvalue of M
NULL_SPACE_TOL = 1e-12  # sup-norm tolerance for M applied to its known null vectors
POWER_ITERATION_TOL = 1e-12  # change in the Rayleigh estimate between iterations
POWER_ITERATION_MAX_ITER = 20000

# Size caps
ENUMERATION_CAP = 10**8  # product of list sizes (upper bound on |Omega|), never above q^n
OMEGA_CAP = 200_000  # enumerated state spaces (Glauber matrix, sweep projections)
DENSE_GLAUBER_LIMIT = 3000  # dense eigen-solve of the Glauber matrix up to this many states
EXACT_TV_LIMIT = 600  # worst-start TV from matrix powers up to this many states
TV_HISTOGRAM_CAP = 200_000  # histogram size for empirical TV estimates
CONDUCTANCE_PAIR_LIMIT = 14  # walks with at most this many pairs get a conductance spot-check
MAX_REJECTION_TRIES = 64  # random assignments tried per sampled partial coloring

# Parameter region
ALPHA_STAR_BRACKET = (1.5, 2.0)  # root of exp(1/x) = x lies in here
ALPHA_STAR_ITERATIONS = 60  # bisection iterations
BETA_CEILING = 0.655  # beta stays below this for every epsilon > 0
GRID_MAX_DELTA = 50  # largest Delta in the Phi region grid

# Sampler settings
STEP_CHUNK = 1 << 16  # random draws generated per block
CHAIN_BLOCK = 1024  # chains handed to one worker task in batched runs
DEFAULT_STEPS = 10_000
DEFAULT_CHAINS = 1
DEFAULT_STRIDE = 1000
DEFAULT_MAX_STEPS = 1_000_000
DEFAULT_TRANSITION_SAMPLES = 200_000  # simulated moves per tested row
DEFAULT_TRANSITION_ROWS = 64  # every row is tested when |Omega| is at most this, else a seeded sample
MIXING_THRESHOLD = 0.25  # TV level that defines the mixing time

# Verification defaults
DEFAULT_SEED = 0
DEFAULT_BUDGET = 2000  # tuple cap for verify/sweep runs
DEFAULT_EPSILON = 0.5
DEFAULT_EPSILONS = (0.1, 0.5, 1.0)

# Report settings
SCHEMA_VERSION = "spectral-colorings/1"
REPORT_INDENT = 2

# Exit codes
EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

# Logging
LOG_DIR = "logs"
APP_LOG_MAX_BYTES = 10 * 1024 * 1024  # 10MB files
APP_LOG_BACKUPS = 5
ERROR_LOG_MAX_BYTES = 5 * 1024 * 1024
ERROR_LOG_BACKUPS = 3

VERIFY_CHECKS = (
    "obs11",
    "lemma14",
    "lemma17",
    "lemma18",
    "lemma22",
    "lemma25",
    "lemma26",
    "thm9",
    "thm19",
    "biased",
    "biased-thm",
    "thm19-step",
    "biased-step",
    "jk",
    "induced",
)

SPECTRAL_CHECKS = ("thm8", "sweep", "gap", "bound")


def default_threads() -> int:
    """Logical core count, falling back to one."""
    return os.cpu_count() or 1


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved invocation, echoed into every report."""

    subcommand: str
    action: Optional[str] = None
    input_path: Optional[str] = None
    generator: Optional[str] = None
    q: Optional[int] = None
    delta: Optional[int] = None
    n: Optional[int] = None
    epsilon: float = DEFAULT_EPSILON
    seed: int = DEFAULT_SEED
    budget: int = DEFAULT_BUDGET
    omega_cap: int = OMEGA_CAP
    enum_cap: int = ENUMERATION_CAP
    threads: int = 1
    tol: Optional[float] = None  # None keeps each check's own tolerance
    slack: float = INEQUALITY_SLACK
    steps: int = DEFAULT_STEPS
    chains: int = DEFAULT_CHAINS
    stride: int = DEFAULT_STRIDE
    max_steps: int = DEFAULT_MAX_STEPS
    start: str = "smallest"
    random_lists: bool = False
    min_list_size: Optional[int] = None
    out: Optional[str] = None
    csv: Optional[str] = None
    timestamp: bool = True
    extra: Tuple[Tuple[str, Any], ...] = field(default_factory=tuple)

    def to_dict(self) -> Dict[str, Any]:
        """Plain dictionary view; output paths are left out so reports stay comparable."""
        data = asdict(self)
        data["extra"] = dict(self.extra)
        data.pop("out", None)
        data.pop("csv", None)
        data.pop("timestamp", None)
        return data
