from __future__ import annotations

import sys

from fracquad.cli import main

sys.exit(main())
