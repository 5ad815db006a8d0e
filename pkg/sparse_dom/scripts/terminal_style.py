# A class for styling the terminal output of `run_checks`.
#
# Created On: Oct 19, 2026
#

import sys

# The following things make ANSI works on different platforms too!
PLATFORMS = {
    "linux": ['linux'],
    "windows": ['win32', 'cygwin', 'msys'],
    "mac": ['darwin']
}

if sys.platform in PLATFORMS['windows']:
    import os
    os.system("color")


class DomStyle:

    """
    ANSI escape codes used by the check summaries.

        USAGES:
            >>> from sparse_dom.scripts.terminal_style import DomStyle
            >>> print(f"{DomStyle.BOLD + DomStyle.LIME_GREEN}PASS{DomStyle.END}")

    Every code can be switched off at once with `DomStyle.disable()`, which the
    CLI does for `--no-color` and when stdout is not a terminal.
    """

    # Stylings
    BOLD = '\033[1m'
    ITALLIC = '\033[3m'

    END = '\033[0m'

    # Foreground Colors
    RED = '\x1b[38;2;255;0;0m'
    CORAL = '\x1b[38;2;255;127;80m'
    PALE_GOLDEN_ROD = '\x1b[38;2;238;232;170m'
    LIGHT_YELLOW = '\x1b[38;2;255;255;224m'
    LIME_GREEN = '\x1b[38;2;50;205;50m'
    SPRING_GREEN = '\x1b[38;2;0;255;127m'
    AQUA_MARINE = '\x1b[38;2;127;255;212m'

    _CODES = (
        "BOLD", "ITALLIC", "END", "RED", "CORAL", "PALE_GOLDEN_ROD", "LIGHT_YELLOW",
        "LIME_GREEN", "SPRING_GREEN", "AQUA_MARINE",
    )

    @classmethod
    def disable(cls):
        """Replace every escape code by the empty string."""
        for name in cls._CODES:
            setattr(cls, name, '')
