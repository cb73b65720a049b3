"""Self-similar profiles of u u_tt - u_t^2 = u u_x u_t."""

from ._core import *  # noqa: F401,F403
from ._core import SelfsimError, run

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"


def main() -> int:
    import sys

    code, out, err = run(sys.argv[1:])
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code
