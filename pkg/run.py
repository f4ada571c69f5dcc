#!/usr/bin/env python3
"""
Runner for the PrivGNN Workbench.
Usage: python run.py [--config FILE] <command> [options]

The default configuration is resolved against the repository root, so the
runner works from any directory.
"""

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent
sys.path.insert(0, str(ROOT / 'src'))

if __name__ == '__main__':
    from src.__main__ import cli
    cli(prog_name='run.py', default_map={'config': str(ROOT / 'config' / 'config.yaml')})
