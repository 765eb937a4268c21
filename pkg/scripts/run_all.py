#!/usr/bin/env python3
"""Run every shipped experiment config into out/<name>/."""

import sys
from pathlib import Path

from nematiclab.cli import main

if __name__ == "__main__":
    configs = Path(__file__).resolve().parent.parent / "configs"
    raise SystemExit(main(["sweep", str(configs / "*.ini"), *sys.argv[1:]]))
