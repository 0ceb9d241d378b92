"""Exact engine for finite dimensional k-linear categories presented by bound
quivers: tensor products, idempotent completions, module categories, and
almost split sequences, with n-complex and n-cyclic categories built in.
"""

__version__ = "0.1.0"
