"""Exact-arithmetic workbench for modular tensor category data."""

from . import analyze, cyclo, fusion, jsonio, moddata, zoo

__all__ = ["analyze", "cyclo", "fusion", "jsonio", "moddata", "zoo"]
__version__ = "0.1.0"
