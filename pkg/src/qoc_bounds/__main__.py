#  SPDX-License-Identifier: GPL-3.0-or-later

"""Allow ``python -m qoc_bounds``."""

from .cli import main

main()
