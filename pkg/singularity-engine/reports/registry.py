# =====================================================
# Experiment registry
# One JSON record per run + index.json under <out>/registry
# Records are written temp-then-rename and never rewritten
# =====================================================

import hashlib
import json
import os
import re
import tempfile
import threading
import time
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone

from joblib import Parallel, delayed

from config.settings import DEFAULT_SEED, N_JOBS, OUT_DIR, TOOL_VERSION
from core.console import error, info, warn
from core.errors import LabError, SpecValidation
from reports.export import canonical_json
from reports.operations import OPERATIONS, RunContext
from reports.run_logger import log_run

# ---------------- CONFIG ----------------

REGISTRY_DIR = "registry"
ARTIFACT_DIR = "artifacts"
INDEX_NAME = "index.json"
NAME_PATTERN = re.compile(r"^[A-Za-z0-9][A-Za-z0-9_.-]*$")
MAX_SEED = 2 ** 64 - 1

_index_lock = threading.Lock()


def _sha256(payload) -> str:
    return hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


# =====================================================
# SPEC
# =====================================================

@dataclass
class ExperimentSpec:
    name: str
    target: str
    params: dict = field(default_factory=dict)
    out_dir: str = OUT_DIR
    seed: int = DEFAULT_SEED

    @classmethod
    def from_json(cls, payload: dict) -> "ExperimentSpec":
        if not isinstance(payload, dict):
            raise SpecValidation("[ERROR] experiment spec must be a JSON object")
        unknown = set(payload) - {"name", "target", "params", "out_dir", "seed"}
        if unknown:
            raise SpecValidation(f"[ERROR] unknown spec keys: {sorted(unknown)}")
        try:
            return cls(
                name=payload["name"],
                target=payload["target"],
                params=payload.get("params") or {},
                out_dir=payload.get("out_dir") or OUT_DIR,
                seed=payload.get("seed", DEFAULT_SEED),
            )
        except KeyError as exc:
            raise SpecValidation(f"[ERROR] experiment spec missing key {exc}") from exc

    @classmethod
    def from_file(cls, path: str) -> "ExperimentSpec":
        try:
            with open(path, "r", encoding="utf-8") as f:
                payload = json.load(f)
        except (OSError, json.JSONDecodeError) as exc:
            raise SpecValidation(f"[ERROR] cannot read spec file {path}: {exc}") from exc
        return cls.from_json(payload)

    @property
    def spec_hash(self) -> str:
        return _sha256({"target": self.target, "params": self.params, "seed": self.seed})

    def validate(self) -> dict:
        """Checks the spec and returns the target's resolved parameters."""

        if not isinstance(self.name, str) or not NAME_PATTERN.match(self.name):
            raise SpecValidation(f"[ERROR] run name must match {NAME_PATTERN.pattern}, got {self.name!r}")
        if self.target not in OPERATIONS:
            raise SpecValidation(f"[ERROR] unknown target {self.target!r}; choose from {sorted(OPERATIONS)}")
        if not isinstance(self.params, dict):
            raise SpecValidation("[ERROR] params must be a JSON object")
        if not isinstance(self.seed, int) or isinstance(self.seed, bool) or not 0 <= self.seed <= MAX_SEED:
            raise SpecValidation(f"[ERROR] seed must be an unsigned 64-bit integer, got {self.seed!r}")

        try:
            return OPERATIONS[self.target].validate(self.params)
        except SpecValidation:
            raise
        except (LabError, ValueError, TypeError, KeyError) as exc:
            raise SpecValidation(f"[ERROR] {self.target}: {exc}") from exc

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "target": self.target,
            "params": self.params,
            "out_dir": self.out_dir,
            "seed": self.seed,
        }


# =====================================================
# RECORD
# =====================================================

@dataclass(frozen=True)
class RunRecord:
    name: str
    target: str
    spec_hash: str
    status: str
    started_at: str
    finished_at: str
    wall_seconds: float
    artifacts: tuple
    summary: dict
    summary_hash: str
    tool_version: str = TOOL_VERSION
    claim: str = ""
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == "ok"

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "target": self.target,
            "spec_hash": self.spec_hash,
            "status": self.status,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "wall_seconds": self.wall_seconds,
            "artifacts": list(self.artifacts),
            "summary": self.summary,
            "summary_hash": self.summary_hash,
            "tool_version": self.tool_version,
            "claim": self.claim,
            "message": self.message,
        }

    @classmethod
    def from_json(cls, payload: dict) -> "RunRecord":
        payload = dict(payload)
        payload["artifacts"] = tuple(payload.get("artifacts", ()))
        return cls(**payload)


# =====================================================
# STORAGE
# =====================================================

def registry_dir(out_dir: str | None = None) -> str:
    return os.path.join(out_dir or OUT_DIR, REGISTRY_DIR)


def _atomic_write_json(path: str, payload: dict):
    directory = os.path.dirname(path)
    os.makedirs(directory, exist_ok=True)
    handle, temp_path = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(handle, "w", encoding="utf-8") as f:
            json.dump(payload, f, indent=4)
        os.replace(temp_path, path)
    except BaseException:
        if os.path.exists(temp_path):
            os.remove(temp_path)
        raise


def load_index(out_dir: str | None = None) -> dict:
    path = os.path.join(registry_dir(out_dir), INDEX_NAME)
    if not os.path.exists(path):
        return {}
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def load_record(name: str, out_dir: str | None = None) -> RunRecord:
    path = os.path.join(registry_dir(out_dir), f"{name}.json")
    if not os.path.exists(path):
        raise FileNotFoundError(f"[ERROR] no registered run named {name!r} in {registry_dir(out_dir)}")
    with open(path, "r", encoding="utf-8") as f:
        return RunRecord.from_json(json.load(f))


def _register(record: RunRecord, out_dir: str) -> bool:
    """Writes the record and its index entry unless the name is already taken."""

    with _index_lock:
        index = load_index(out_dir)
        if record.name in index:
            return False

        directory = registry_dir(out_dir)
        _atomic_write_json(os.path.join(directory, f"{record.name}.json"), record.to_json())
        index[record.name] = {
            "target": record.target,
            "spec_hash": record.spec_hash,
            "status": record.status,
            "summary_hash": record.summary_hash,
            "finished_at": record.finished_at,
        }
        _atomic_write_json(os.path.join(directory, INDEX_NAME), index)
        return True


# =====================================================
# EXECUTION
# =====================================================

def run(spec: ExperimentSpec) -> RunRecord:
    """
    Executes one spec and registers its record.
    Only SpecValidation escapes; every downstream failure is captured in the
    record with status "error". A repeated name must carry the same spec
    hash; the repeat is compared against the registered summary hash.
    """

    resolved = spec.validate()
    spec_hash = spec.spec_hash

    existing = load_index(spec.out_dir).get(spec.name)
    if existing is not None and existing["spec_hash"] != spec_hash:
        raise SpecValidation(
            f"[ERROR] run name {spec.name!r} is already registered with a different spec"
        )

    operation = OPERATIONS[spec.target]
    ctx = RunContext(os.path.join(spec.out_dir, ARTIFACT_DIR, spec.name), spec.seed, operation.claim)

    started_at = _now()
    start = time.perf_counter()
    try:
        summary = json.loads(canonical_json(operation.execute(resolved, ctx)))
        status, message = "ok", ""
    except Exception as e:
        summary = {}
        status, message = "error", f"{type(e).__name__}: {e}"
        error(f"run {spec.name} ({spec.target}) failed: {message}")
    wall = time.perf_counter() - start

    record = RunRecord(
        name=spec.name,
        target=spec.target,
        spec_hash=spec_hash,
        status=status,
        started_at=started_at,
        finished_at=_now(),
        wall_seconds=wall,
        artifacts=tuple(ctx.artifacts),
        summary=summary,
        summary_hash=_sha256(summary),
        claim=operation.claim,
        message=message,
    )

    if not _register(record, spec.out_dir):
        registered = load_index(spec.out_dir)[spec.name]
        reproduced = registered["summary_hash"] == record.summary_hash
        note = "reproduced registered summary" if reproduced else "summary differs from the registered run"
        if not reproduced:
            warn(f"run {spec.name}: {note}")
        record = replace(record, message=(message + "; " if message else "") + note)

    log_run({
        "timestamp": record.finished_at,
        "runName": record.name,
        "target": record.target,
        "specHash": record.spec_hash,
        "status": record.status,
        "wallSeconds": record.wall_seconds,
        "summaryHash": record.summary_hash,
        "message": record.message,
    }, spec.out_dir)

    info(f"run {spec.name} ({spec.target}) -> {status} in {wall:.2f}s, summary {record.summary_hash[:12]}")
    return record


def run_many(specs, n_jobs: int | None = None) -> list:
    """Validates every spec up front, then runs them on a thread pool."""

    specs = list(specs)
    seen = {}
    for spec in specs:
        spec.validate()
        if seen.get(spec.name, spec.spec_hash) != spec.spec_hash:
            raise SpecValidation(f"[ERROR] run name {spec.name!r} appears twice with different specs")
        seen[spec.name] = spec.spec_hash

    return Parallel(n_jobs=n_jobs or N_JOBS, prefer="threads")(delayed(run)(spec) for spec in specs)
