import sys

from rankbreak.cli import main

sys.exit(main())
