#!/usr/bin/env python3
"""
Main entry point for vecfont.
This allows the 'python -m src' command to work.
"""

import sys

from src.main import main

if __name__ == "__main__":
    sys.exit(main())
