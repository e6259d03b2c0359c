__author__ = 'drsim developers'

import sys

from drsim.cli import main

sys.exit(main())
