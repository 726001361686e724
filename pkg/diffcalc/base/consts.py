import os

# Reducer
DEFAULT_FUEL = 100_000

# Equality
DEFAULT_TRIALS = 8
DEFAULT_SEED = 1337
SEED_ENV_VAR = "DIFFCALC_SEED"

# Base interpreter sampling, used when canonical forms cannot decide.
EXPR_EQ_SAMPLES = 16
EXPR_EQ_SEED = 20240501
EXPR_EQ_RTOL = 1e-9
SAMPLE_LOW = -2.0
SAMPLE_HIGH = 2.0

# Numeric oracles
FINITE_DIFF_STEP = 1e-5
FINITE_DIFF_TOL = 1e-5
QUADRATURE_TOL = 1e-10
DISCRETE_AGREEMENT_TOL = 1e-9

# Verification suites, cases per property
METATHEORY_CASES = 200
THEOREM_CASES = 100
DISCRETE_CASES = 100
ROUNDTRIP_CASES = 500

# Properties run with fewer cases unless --cases or --suite.cases says otherwise.
# Each chain rule case builds two finite-difference Jacobians.
PROPERTY_CASES = {"theorems.chain_rule": 30}

# CLI exit codes
EXIT_OK = 0
EXIT_ERROR = 1
EXIT_FUEL = 2
EXIT_UNDEFINED = 3

# Logging
DEFAULT_EVENTS_RETENTION = 16 * 1024 * 1024  # 16 MB


def default_seed() -> int:
    """Seed used when none is given; ``DIFFCALC_SEED`` overrides it."""
    value = os.environ.get(SEED_ENV_VAR)
    if value is None or value.strip() == "":
        return DEFAULT_SEED
    return int(value)
