import sys

from edgeworth import cli

if __name__ == '__main__':
    sys.exit(cli.main())
