from __future__ import print_function

import sys

from compas_mepoly.cli import main

if __name__ == '__main__':
    sys.exit(main())
