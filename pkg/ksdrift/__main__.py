"""``python -m ksdrift``: run the unified CLI and exit with its status code."""
import sys

from .cli import main

if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
