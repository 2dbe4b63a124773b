"""Shared exception types."""

from __future__ import annotations


class AsetFormatError(ValueError):
    """Raised when a set file does not conform to the ASET v1 format."""


class InvariantViolation(RuntimeError):
    """A guaranteed inequality failed; this indicates an implementation bug.

    Every extraction step in this package is backed by a proof that is
    constructive and exact, so the inequalities it asserts cannot fail on
    valid input.  If one does, the computation is wrong and the result must
    not be trusted.
    """
