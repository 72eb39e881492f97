"""Code-switching-aware CTC decoding and evaluation toolkit."""

__version__ = "0.1.0"
