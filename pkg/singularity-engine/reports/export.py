import json
import os
from datetime import datetime, timezone

import numpy as np
import pandas as pd

from config.settings import TOOL_VERSION

ENGINE_NAME = "singularity-engine"


def _plain(value):
    """JSON fallback for numpy scalars and arrays."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if hasattr(value, "value"):
        return value.value
    raise TypeError(f"not JSON serializable: {type(value).__name__}")


def export_json(payload: dict, output_path: str, claim: str | None = None) -> str:
    """
    Write a result payload with the engine meta block.
    `claim` names the statement the experiment tests.
    """

    document = {
        "meta": {
            "generatedAt": datetime.now(timezone.utc).isoformat(),
            "engine": ENGINE_NAME,
            "toolVersion": TOOL_VERSION,
            "claim": claim,
        },
    }
    document.update(payload)

    os.makedirs(os.path.dirname(os.path.abspath(output_path)), exist_ok=True)
    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=4, default=_plain)
    return output_path


def export_csv(frame: pd.DataFrame, output_path: str, claim: str | None = None, **sidecar) -> list:
    """CSV with header row plus a JSON sidecar (same stem) naming the tested claim."""

    os.makedirs(os.path.dirname(os.path.abspath(output_path)), exist_ok=True)
    frame.to_csv(output_path, index=False)

    stem, _ = os.path.splitext(output_path)
    meta_path = export_json({"csv": os.path.basename(output_path), "columns": list(frame.columns), **sidecar},
                            stem + ".meta.json", claim)
    return [output_path, meta_path]


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=_plain)
