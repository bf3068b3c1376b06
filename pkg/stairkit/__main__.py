"""Entry point for python -m stairkit"""

import sys

from stairkit.cli import main

sys.exit(main())
