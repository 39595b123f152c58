"""primeshift: exact search and verification of multiplicative function
values at shifted prime-tuple arguments."""

__version__ = "0.1.0"
