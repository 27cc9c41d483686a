import sys

from rdhweno.cli import main

sys.exit(main())
