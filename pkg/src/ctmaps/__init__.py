"""Computational checks for a hyperbolic group whose free subgroup has no Cannon-Thurston map."""

from __future__ import annotations

__version__ = "0.1.0"
