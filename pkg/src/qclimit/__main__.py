import sys

from qclimit.cli import main

sys.exit(main())
