import sys

from tcct.main import main

sys.exit(main())
