"""In-memory registry of loaded domains (preprocessing cache)."""

from __future__ import annotations

import itertools
import threading

from ..config import Settings
from ..domain import DomainContext
from ..mesh import TriMesh


class DomainRegistry:
    def __init__(self, settings: Settings):
        self.settings = settings
        self._domains: dict[str, DomainContext] = {}
        self._lock = threading.Lock()
        self._counter = itertools.count(1)

    def add(self, mesh: TriMesh, name: str | None) -> tuple[str, DomainContext]:
        with self._lock:
            domain_id = f"d{next(self._counter):04d}"
            ctx = DomainContext(mesh, self.settings, name or domain_id)
            self._domains[domain_id] = ctx
            return domain_id, ctx

    def get(self, domain_id: str) -> DomainContext | None:
        with self._lock:
            return self._domains.get(domain_id)

    def remove(self, domain_id: str) -> bool:
        with self._lock:
            return self._domains.pop(domain_id, None) is not None

    def items(self):
        with self._lock:
            return list(self._domains.items())
