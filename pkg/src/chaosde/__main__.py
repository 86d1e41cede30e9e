import sys

from chaosde.cli import main

sys.exit(main())
