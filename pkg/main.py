import sys

from debroglie.cli import main

# Local runner; defaults to the four reference fringe panels
if __name__ == "__main__":
    sys.exit(main(sys.argv[1:] or ["fringe"]))
