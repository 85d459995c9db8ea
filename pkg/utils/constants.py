"""Application constants."""
from .helpers import env_float, env_int

# Floating comparisons (state norms, Born probabilities, law checks)
DEFAULT_TOLERANCE = env_float("MERMIN_TOLERANCE", 1e-9)

# Outcome probabilities above this count as possible
POSSIBILITY_THRESHOLD = 1e-9

# Dense state vectors: D**N amplitudes at most
MAX_AMPLITUDES = env_int("MERMIN_MAX_AMPLITUDES", 2**24)

# Explicit enumeration of group elements / grids
ENUMERATION_BOUND = env_int("MERMIN_ENUMERATION_BOUND", 10**6)

# Subgroup membership switches from a cached element set to lattice solving above this order
MEMBERSHIP_ENUMERATION_BELOW = 10**4

# Deterministic-assignment search in the possibilistic LHV check
LHV_SEARCH_BOUND = env_int("MERMIN_LHV_SEARCH_BOUND", 2**20)

# Relations are dense bit matrices on carriers of at most this size
FREL_CARRIER_BOUND = env_int("MERMIN_FREL_CARRIER_BOUND", 64)

# Secret-sharing statistics
TV_THRESHOLD = 0.05
QSS_MIN_ROUNDS = 100
QSS_BATCH_SIZE = 4096

PAIR_POLICIES = ["combinations", "cyclic", "preset-qutrit-ten"]

TABS = [
    ("extension", "Extension", "⊕"),
    ("scenario", "Scenario", "▣"),
    ("pairs", "Pairs", "◔"),
    ("qss", "Sharing", "⚿"),
]
