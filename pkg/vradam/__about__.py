"""
SPDX-License-Identifier: MIT
"""

__author__ = 'vradam contributors'
__version__ = '0.1.0'
