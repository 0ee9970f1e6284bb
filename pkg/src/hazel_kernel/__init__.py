"""Structure-editor kernel for a typed lambda calculus with holes."""

__version__ = "0.1.0"
