"""
mtverify - Verification toolkit for Mazur-Tate modular elements of elliptic curves
"""

__version__ = "0.1.0"
__author__ = "mtverify"
