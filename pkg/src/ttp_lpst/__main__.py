import sys

from ttp_lpst.cli import main

sys.exit(main())
