#!/usr/bin/env python3
"""
degma - numerical lab for degenerate Monge-Ampere equations
"""

import sys

from src.cli.runner import main

if __name__ == "__main__":
    sys.exit(main())
