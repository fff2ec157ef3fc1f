#!/usr/bin/env python3
"""
Tracker command line.

Usage:
    python scripts/run_tracker.py [--config FILE] [--seed N] [--out DIR] <command> ...

Commands: synth, train, track, eval, visualize, bench, simcheck
"""

import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.cli.main import main


if __name__ == "__main__":
    sys.exit(main())
