"""Adapter loading the (stem, weight) table of a computed E∞ dataset."""

import logging
from collections import defaultdict
from typing import Optional

from diffsync import Adapter

from novikov_eta.datasets import SSDataset
from novikov_eta.diffsync.models import DimensionEntry

logger = logging.getLogger(__name__)


class RouteAdapter(Adapter):
    """DiffSync adapter over one route's E∞ page.

    Usage::

        adapter = RouteAdapter(dataset=run_localized_manss(), max_stem=24, max_coweight=12)
        adapter.load()
    """

    entry = DimensionEntry

    top_level = ["entry"]

    def __init__(self, dataset: SSDataset, max_stem: int, max_coweight: int, job=None, **kwargs):
        super().__init__(**kwargs)
        self.dataset = dataset
        self.max_stem = max_stem
        self.max_coweight = max_coweight
        self.job = job

    def load(self):
        """Load every (stem, weight) cell of the window that holds at least one class."""
        names = defaultdict(list)
        for item in self.dataset.classes:
            degree = item.degree
            if degree.w is None:
                self._log("warning", f"Class {item.name} at {degree} has no weight; skipped")
                continue
            if abs(degree.stem) > self.max_stem or not 0 <= degree.coweight <= self.max_coweight:
                continue
            names[(degree.stem, degree.w)].append(item.name)
        for (stem, weight), labels in sorted(names.items()):
            self.add(
                self.entry(
                    stem=stem,
                    weight=weight,
                    dimension=len(labels),
                    coweight=stem - weight,
                    names=", ".join(sorted(labels)),
                )
            )
        self._log("info", f"Loaded {len(names)} cells of {self.dataset.name}.")

    def _log(self, level: str, message: str, job: Optional[object] = None):
        getattr(logger, level)(message)
        job = job or self.job
        if job is not None:
            getattr(job.logger, level)(message)
