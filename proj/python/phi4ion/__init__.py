from ._phi4ion import *  # noqa: F401,F403
from ._phi4ion import __doc__  # noqa: F401
