# Sparse domination checks
#
# Created On: Oct 19, 2026
#

from sparse_dom.run_checks import main
from pathlib import Path
import sys


def run():
    root = Path.cwd()
    return main(root_dir=root)


if __name__ == '__main__':
    sys.exit(run())
