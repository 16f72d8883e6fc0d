# Default settings for the sketchboot project
#
# Every command-line flag and experiment config key falls back to the value
# defined here. Values are plain module constants so they can be overridden
# per run without touching the call sites.

# Bootstrap operating point: B = 30 replicates at the 95% level.
BOOTSTRAP_SAMPLES = 30
ALPHA = 0.05

# Index set used when none is given (leading triplet only)
INDEX_SET = (1,)

# Number of rows of A read per block when streaming over the matrix
ROW_BLOCK_SIZE = 1024

# Columns of the Gaussian sketching matrix S generated from one random stream.
# The blocking fixes which stream produces which column, so it is part of
# the reproducibility contract: changing it changes every Gaussian sketch.
GAUSSIAN_BLOCK_COLUMNS = 256

# A vector counts as unit-norm when its norm is within this of 1
UNIT_NORM_TOLERANCE = 1e-8

# Sampling probabilities must sum to one within this tolerance
PROBABILITY_SUM_TOLERANCE = 1e-12

# Singular values below RANK_TOLERANCE * sigma_1 count as zero for rank checks
RANK_TOLERANCE = 1e-12

# Scaled-chi elliptical rows clip χ²_dof / dof at this value, then rescale to E[ν²] = 1
SCALED_CHI_CAP = 4.0

# Size guard for the exact SVD used as ground truth by the experiment harness
MAX_EXACT_SVD_ENTRIES = 50_000_000

# Parallel workers for bootstrap replicates and Monte-Carlo trials (joblib)
N_JOBS = 1
JOBLIB_PREFER = 'threads'

# Where the command-line tool writes its outputs by default
DATA_DIRECTORY = 'data'
