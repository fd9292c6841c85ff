#!/usr/bin/env python3
"""
Startup script - configures logging, ensures the run registry schema and dispatches the CLI
"""
import logging
import sys

from dlcm.core.config import LOG_LEVEL

# Configure logging
logging.basicConfig(level=getattr(logging, LOG_LEVEL.upper(), logging.INFO))


def ensure_registry_tables():
    """Ensure registry tables exist before any command runs"""
    try:
        from dlcm.core.database import init_registry

        init_registry()
        return True
    except Exception as e:
        print(f"⚠️ Run registry unavailable: {e}")
        return False


if __name__ == "__main__":
    if not ensure_registry_tables():
        sys.exit(3)

    from dlcm.cli import main

    sys.exit(main())
