import sys

from mmnudge.cli import main

sys.exit(main())
