# reports/models.py
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict


@dataclass
class ReportRecord:
    id: str
    kind: str                 # analyze | scan | verify | build-example
    created_at: str           # ISO timestamp
    config: Dict[str, Any]    # full resolved run configuration
    payload: Dict[str, Any]   # deterministic results
