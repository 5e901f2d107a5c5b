"""Certified numerics for perturbed Khintchine-type approximation and Piatetski-Shapiro equations."""

from __future__ import annotations

__version__ = "0.1.0"
ARTIFACT = "artifact"
