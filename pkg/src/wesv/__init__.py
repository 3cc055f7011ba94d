"""Special values at s = 0 of L-functions of duals of Z-constructible sheaves on Spec(O_K)."""

__version__ = "0.1.0"
