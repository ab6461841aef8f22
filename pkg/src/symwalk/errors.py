"""Exception types shared across the package."""


class LatticeOverflowError(ValueError):
    """Amplitude would be shifted past the end of a finite line."""


class BranchCapError(ValueError):
    """Exact trajectory enumeration would exceed the configured branch cap."""


class InvariantError(RuntimeError):
    """A numerical invariant (trace, normalization, completeness) drifted out of tolerance."""
