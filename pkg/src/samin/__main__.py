import sys

from samin.cli import main

sys.exit(main())
