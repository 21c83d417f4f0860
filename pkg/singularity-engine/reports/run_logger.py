# =====================================================
# Run event logger
# Thread-safe CSV log, one row per finished experiment
# =====================================================

import csv
import os
import threading

from config.settings import OUT_DIR

# ===============================
# PATH CONFIG
# ===============================

LOG_NAME = "runs_log.csv"

# ===============================
# CSV HEADER
# ===============================

CSV_HEADER = [
    "timestamp",
    "run_name",
    "target",
    "spec_hash",
    "status",
    "wall_seconds",
    "summary_hash",
    "message",
]

# Thread lock for run_many worker pools
_lock = threading.Lock()


def log_path(out_dir: str | None = None) -> str:
    return os.path.join(out_dir or OUT_DIR, "logs", LOG_NAME)


def _initialize_log_file(path: str):
    if not os.path.exists(path):
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with open(path, mode="w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(CSV_HEADER)


def log_run(payload: dict, out_dir: str | None = None) -> str:
    """
    Append one run event (thread-safe).

    Expected payload keys:
    - timestamp
    - runName
    - target
    - specHash
    - status
    - wallSeconds
    - summaryHash
    - message (optional)
    """

    path = log_path(out_dir)
    with _lock:
        _initialize_log_file(path)
        with open(path, mode="a", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow([
                payload.get("timestamp"),
                payload.get("runName"),
                payload.get("target"),
                payload.get("specHash"),
                payload.get("status"),
                round(payload.get("wallSeconds", 0.0), 6),
                payload.get("summaryHash"),
                payload.get("message", ""),
            ])
    return path
