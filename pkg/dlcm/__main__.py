import logging
import sys

from .cli import main
from .core.config import LOG_LEVEL

logging.basicConfig(level=getattr(logging, LOG_LEVEL.upper(), logging.INFO))

sys.exit(main())
