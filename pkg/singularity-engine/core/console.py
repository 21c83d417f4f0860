# =====================================================
# Tagged console output ([INFO] / [WARN] / [ERROR])
# =====================================================

import os
import sys


def _quiet() -> bool:
    return os.getenv("LAB_QUIET", "0").strip().lower() in ("1", "true", "yes")


def info(message: str):
    if not _quiet():
        print(f"[INFO] {message}")


def warn(message: str):
    print(f"[WARN] {message}")


def error(message: str):
    print(f"[ERROR] {message}", file=sys.stderr)
