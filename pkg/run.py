"""
Main entry point for leakguard.

Usage:
    python run.py <subcommand> [options]
    python run.py serve            # HTTP API on 127.0.0.1:8000
    python run.py --help           # subcommands and exit codes
"""

from app.cli import main

if __name__ == "__main__":
    main()
