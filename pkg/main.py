# main.py

import sys
import os

# Ensure project root is on sys.path
PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)


def main(argv=None):
    from presentation_layer.CommandLineUI import CommandLineUI

    return CommandLineUI().run(argv)


if __name__ == "__main__":
    sys.exit(main())
