"""``python -m novikov_eta`` runs the CLI."""

import sys

from novikov_eta.cli import main

sys.exit(main())
