# Standard library
import sys

# Local imports
from stochreach.cli import main

sys.exit(main())
