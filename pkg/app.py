"""Main entry point for the Evans-function toolkit CLI."""

import sys

from cli.main import main


if __name__ == "__main__":
    sys.exit(main())
