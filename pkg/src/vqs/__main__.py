import sys

from vqs.cli import main

sys.exit(main())
