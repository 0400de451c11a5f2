"""DiffSync model for one cell of a (stem, weight) dimension table."""

from typing import Optional

from diffsync import DiffSyncModel


class DimensionEntry(DiffSyncModel):
    """Number of E∞ basis classes at one (stem, weight).

    Identifiers:
        stem:   u − s.
        weight: motivic weight.

    Attributes:
        dimension: Number of classes.
        coweight:  stem − weight, carried for reporting.
    """

    _modelname = "entry"
    _identifiers = ("stem", "weight")
    _attributes = ("dimension",)

    stem: int
    weight: int
    dimension: int = 0
    coweight: Optional[int] = None
    names: Optional[str] = None
