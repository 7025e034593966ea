#!/usr/bin/env python3
"""
Run script for qharness.
Equivalent to the `qharness` console script: marginal, kernel, sample and verify subcommands.
"""

import sys

from qharness.cli import main

if __name__ == "__main__":
    sys.exit(main())
