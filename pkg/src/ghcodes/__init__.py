"""F_p-additive generalised Hadamard codes: constructions, invariants, bounds."""

__version__ = "0.1.0"
