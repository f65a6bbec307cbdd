import sys

from domain_sieve.cli import main

if __name__ == "__main__":
    sys.exit(main())
