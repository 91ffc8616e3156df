"""Default constants used across the reward engine, agent, and harness.

These are the published operating points of the evaluation pipeline; every one
of them can be overridden through the relevant config dataclass.
"""

# Video comparison
SAMPLE_FPS = 5.0          # frames per second sampled from rendered videos
DTW_STRICTNESS = 5.0      # k in exp(-k * dtw / max(T, T_hat)) for the structural score
EXACT_DTW_MAX_LEN = 512   # auto mode switches to the fast approximation above this
FAST_DTW_RADIUS = 1       # window radius for the fast approximation

# SSIM kernel
SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_DYNAMIC_RANGE = 255

# Code comparison
BLEU_MAX_N = 4
KEYWORD_WEIGHT = 5.0
NGRAM_FLOOR = 1e-9        # floor applied to zero n-gram precisions
CODEBLEU_WEIGHTS = (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)

# Unified reward mixing
LAMBDA_TEXT = 0.2
LAMBDA_VISUAL = 0.8

# Policy-gradient kernel
GROUP_SIZE = 8
CLIP_EPSILON = 0.2
KL_BETA = 0.005
# Constant token normalizer: floor(0.8 * 2048), the generation budget actually
# available to completions after the prompt share of the context window.
LOSS_NORMALIZER_LENGTH = 1638
DEGENERATE_STD = 1e-8     # group reward std below this zeroes all advantages

# Agent loop
ERROR_TAIL_LINES = 10     # renderer stderr lines fed back into correction prompts
DOC_BUDGET = 8000         # character budget for retrieved API documentation
TEMPERATURE = 0.2
MAX_TOKENS = 2048

# Rendering
RENDER_TIMEOUT = 120.0
RENDER_QUALITY = "low"
