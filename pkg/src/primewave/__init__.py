"""Wave-model prime sieve, sub-sequence atlas and zeta level-curve x-ray."""

__version__ = "0.1.0"
