"""
Copyright (c) 2020-2021, UChicago Argonne, LLC.

See LICENSE file for details.
"""

from ._version import __version__  # noqa: F401
