import sys

from driftkit.cli import main

sys.exit(main())
