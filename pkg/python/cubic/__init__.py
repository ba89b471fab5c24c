"""Cubic-code toolkit: GF(2) algebra, lattice construction and code analysis."""
