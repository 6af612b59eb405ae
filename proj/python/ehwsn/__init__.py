from ._ehwsn import *  # noqa: F401,F403
from ._ehwsn import __doc__  # noqa: F401
