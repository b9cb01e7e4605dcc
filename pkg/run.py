#!/usr/bin/env python3
"""
QuasiToda launcher
Runs a job command or the test suite
"""

import argparse
import os
import subprocess
import sys


def check_dependencies():
    """Check if required dependencies are installed"""
    try:
        import numpy
        import pydantic
        import pydantic_settings
        import structlog
        return True
    except ImportError as e:
        print(f"❌ Missing dependency: {e}", file=sys.stderr)
        print("💡 Run: pip install -r requirements.txt", file=sys.stderr)
        return False


def run_tests(extra):
    """Run tests"""
    if not os.path.exists("app/tests"):
        print("⚠️  No tests directory found", file=sys.stderr)
        return 1

    try:
        import pytest
    except ImportError:
        print("❌ pytest not installed. Run: pip install pytest", file=sys.stderr)
        return 1
    print("🧪 Running tests...", file=sys.stderr)
    return subprocess.run([sys.executable, "-m", "pytest", "app/tests/", "-v", *extra]).returncode


def main():
    parser = argparse.ArgumentParser(
        description="QuasiToda runner",
        epilog="Job commands take their own flags, e.g. `run.py toda-solve --type A --n 3 --seed 42`",
    )
    parser.add_argument("command", help="Job command (see `run.py list`), `list` or `test`")
    args, rest = parser.parse_known_args()

    if not check_dependencies():
        return 3

    if args.command == "test":
        return run_tests(rest)

    from app.commands.registry import COMMANDS
    from app.main import main as run_job

    if args.command == "list":
        for name, spec in COMMANDS.items():
            print(f"{name:14} {spec.summary}")
        return 0
    if args.command not in COMMANDS:
        parser.error(f"unknown command {args.command!r}")
    return run_job([args.command, *rest])


if __name__ == "__main__":
    sys.exit(main())
