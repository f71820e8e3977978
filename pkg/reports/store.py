# One JSON file per run: metadata, config, payload
from __future__ import annotations

import json
import uuid
from dataclasses import asdict, is_dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional

import numpy as np
import pandas as pd

from config import REPORTS_DIR
from reports.models import ReportRecord


def default_report_path(kind: str, suffix: str = ".json") -> Path:
    return REPORTS_DIR / f"{kind}{suffix}"


def to_jsonable(obj: Any) -> Any:
    """Plain Python structures for json: numpy values become floats/lists."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    if is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(asdict(obj))
    return obj


def payload_text(payload: Dict[str, Any]) -> str:
    """Canonical serialisation of a payload (sorted keys), used for determinism checks."""
    return json.dumps(to_jsonable(payload), sort_keys=True)


# Persist one run; the metadata block is the only run-dependent content
def write_report(
    kind: str,
    config: Dict[str, Any],
    payload: Dict[str, Any],
    path: Optional[Path] = None,
) -> Path:

    path = Path(path) if path is not None else default_report_path(kind)
    path.parent.mkdir(parents=True, exist_ok=True)

    data: Dict[str, Any] = {
        "metadata": {
            "id": str(uuid.uuid4()),
            "kind": kind,
            "created_at": datetime.now(timezone.utc).isoformat(),
        },
        "config": to_jsonable(config),
        "payload": to_jsonable(payload),
    }

    with path.open("w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def load_report(path: Path) -> ReportRecord:
    with Path(path).open("r", encoding="utf-8") as f:
        data: Dict[str, Any] = json.load(f)
    meta = data["metadata"]
    return ReportRecord(
        id=meta["id"],
        kind=meta["kind"],
        created_at=meta["created_at"],
        config=data.get("config", {}),
        payload=data.get("payload", {}),
    )


def write_table(frame: pd.DataFrame, path: Optional[Path] = None, kind: str = "table") -> Path:
    path = Path(path) if path is not None else default_report_path(kind, ".csv")
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    return path
