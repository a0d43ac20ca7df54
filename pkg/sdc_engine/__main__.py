import sys

from sdc_engine.launcher import main

sys.exit(main())
