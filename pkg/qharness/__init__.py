# qharness package: q-Meixner Markov processes, kernels and verification
from loguru import logger

__version__ = "0.1.0"

# silent as a library until configure_logging installs a sink
logger.disable("qharness")
