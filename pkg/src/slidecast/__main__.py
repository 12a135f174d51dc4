import sys
from slidecast.cli import main

sys.exit(main())
