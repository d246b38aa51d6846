"""Families of k-sets with bounded t-matching number: exact counts, searches and approximations."""

from .family import SetFamily, generated_family, simplify
from .matching import nu

__all__ = ["SetFamily", "generated_family", "nu", "simplify"]
