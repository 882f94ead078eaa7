import sys
from src.cli.main_command import main

if __name__ == '__main__':
    sys.exit(main())
