"""Cellular-connected UAV height adaptation simulator."""

try:
    from uavsim._core import *  # noqa: F401,F403
except ImportError:  # development layout: _core built at the CMake build root
    from _core import *  # noqa: F401,F403
