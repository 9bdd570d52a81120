#!/usr/bin/env python3
"""AscentCraft - minimum-fuel ascent trajectories with closed-loop optimal steering.

Entry point for the CLI. Run: python ascent.py <command> [options]
"""

import sys

from cli import main

if __name__ == "__main__":
    sys.exit(main())
