"""Adapter loading the dimension table of F2[η^±1, σ, μ9]/(σ²)."""

import logging

from diffsync import Adapter

from novikov_eta.diffsync.models import DimensionEntry

logger = logging.getLogger(__name__)

# (stem, weight) of the polynomial generators besides η; σ squares to zero.
SIGMA = (7, 4)
MU9 = (9, 5)


def closed_form_table(max_stem: int = 24, max_coweight: int = 12) -> dict:
    """(stem, weight) → dimension of F2[η^±1, σ, μ9]/(σ²) with |η| = (1, 1)."""
    sigma_cw = SIGMA[0] - SIGMA[1]
    mu_cw = MU9[0] - MU9[1]
    table = {}
    for stem in range(-max_stem, max_stem + 1):
        for c in range(max_coweight + 1):
            count = sum(1 for e in (0, 1) if c >= e * sigma_cw and (c - e * sigma_cw) % mu_cw == 0)
            if count:
                table[(stem, stem - c)] = count
    return table


def closed_form_names(coweight: int) -> list[str]:
    names = []
    for e in (0, 1):
        rest = coweight - e * (SIGMA[0] - SIGMA[1])
        if rest >= 0 and rest % (MU9[0] - MU9[1]) == 0:
            j = rest // (MU9[0] - MU9[1])
            parts = (["σ"] if e else []) + ([f"μ9^{j}" if j > 1 else "μ9"] if j else [])
            names.append("·".join(parts) or "1")
    return names


class ClosedFormAdapter(Adapter):
    """DiffSync adapter over the expected η-local ring."""

    entry = DimensionEntry

    top_level = ["entry"]

    def __init__(self, max_stem: int, max_coweight: int, **kwargs):
        super().__init__(**kwargs)
        self.max_stem = max_stem
        self.max_coweight = max_coweight

    def load(self):
        table = closed_form_table(self.max_stem, self.max_coweight)
        for (stem, weight), dimension in sorted(table.items()):
            names = ", ".join(closed_form_names(stem - weight))
            self.add(self.entry(stem=stem, weight=weight, dimension=dimension, coweight=stem - weight, names=names))
        logger.info("Loaded %d cells of F2[η^±1, σ, μ9]/(σ²).", len(table))
