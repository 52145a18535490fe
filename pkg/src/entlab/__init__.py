"""Exact computation of computational entropy notions on small domains."""

from .dist import Dist, EntropyParams, Joint
from .distinguisher import Distinguisher
from .engine import NOTIONS, evaluate

__all__ = ["Dist", "Distinguisher", "EntropyParams", "Joint", "NOTIONS", "evaluate"]
