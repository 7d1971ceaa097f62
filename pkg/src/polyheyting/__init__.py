"""Polyadic Heyting algebras, Kripke semantics and a Hilbert checker at desk scale."""
__version__ = "0.1.0"
