# Copyright (c) 2020-2021, UChicago Argonne, LLC.
# See LICENSE file for details.

__version__ = "0.1.0"
