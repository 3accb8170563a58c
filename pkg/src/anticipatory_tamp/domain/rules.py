"""Cost model, tolerances and default budgets.

Operator costs follow the manipulation/NAMO domains this planner targets:
constant pick/place costs, a fixed charge per block cleared, and Euclidean
base travel everywhere else. Geometry numbers are scenario-scale choices.
"""

from __future__ import annotations

# ---------------------------------------------------------------------------
# Operator costs
# ---------------------------------------------------------------------------
PICK_COST = 20.0
PLACE_COST = 20.0
BLOCK_MOVED_COST = 200.0  # NAMO moveclear, per relocated block

# ---------------------------------------------------------------------------
# Geometry tolerances
# ---------------------------------------------------------------------------
OVERLAP_TOLERANCE = 1e-6  # discs may interpenetrate by at most this much
REPLAY_TOLERANCE = 1e-9  # pose/cost agreement on plan replay
CLEARANCE = 0.01  # extra corridor half-width beyond the swept radii

# ---------------------------------------------------------------------------
# Sampling budgets
# ---------------------------------------------------------------------------
SAMPLE_MAX_TRIES = 256  # rejection sampling per pose
SKELETON_RETRY_BUDGET = 8
REFINEMENT_RETRY_BUDGET = 16
STATE_RETRY_BUDGET = 64  # random initial states before giving up
NEIGHBOR_MAX_TRIES = 32  # get_neighbor rejections before returning the input

# ---------------------------------------------------------------------------
# Anticipation
# ---------------------------------------------------------------------------
ORACLE_SAMPLES_PER_TASK = 10
ORACLE_SEED = 7_919
NAMO_DATASET_SIZE = 10_000
CABINET_DATASET_SIZE = 5_000

# Regressor hyperparameters
HIDDEN_WIDTH = 64
N_LAYERS = 3
LEAKY_SLOPE = 0.01
BATCH_SIZE = 8
EPOCHS = 10
LEARNING_RATE = 0.05
VALIDATION_FRACTION = 0.1
ADAGRAD_EPS = 1e-10

# ---------------------------------------------------------------------------
# Preparation (simulated annealing)
# ---------------------------------------------------------------------------
INITIAL_TEMPERATURE = 1000.0
COOLING_RATE = 0.95
PERTURBATION_FRACTION = 0.2  # of the workspace's smaller dimension
JUMP_PROBABILITY = 0.1  # neighbour proposals that resample the object anywhere in its region

# ---------------------------------------------------------------------------
# Deployment defaults
# ---------------------------------------------------------------------------
NAMO_SEQUENCE_LENGTH = 20
NAMO_CANDIDATES = 100
NAMO_PREP_ITERATIONS = 5000
NAMO_TRIALS = 32
NAMO_FULL_TRIALS = 256

CABINET_SEQUENCE_LENGTH = 10
CABINET_CANDIDATES = 200
CABINET_PREP_ITERATIONS = 2500
CABINET_TRIALS = 16
CABINET_FULL_TRIALS = 64

# Grid resolution used when comparing sampled poses for distinctness
POSE_RESOLUTION = 1e-3
