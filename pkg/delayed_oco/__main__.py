import sys
from . import main as main_mod

main = main_mod.main

if __name__ == '__main__':
    """
    CommandLine:
        python -m delayed_oco --help
    """
    sys.exit(main())
