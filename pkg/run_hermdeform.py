#!/usr/bin/env python3
"""hermdeform - インストールせずに実行するためのエントリポイント"""

import sys

from hermdeform.main import main

if __name__ == "__main__":
    sys.exit(main())
