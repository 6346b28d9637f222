"""Allow ``python -m leocoop``."""

import sys

from .cli import main

sys.exit(main())
