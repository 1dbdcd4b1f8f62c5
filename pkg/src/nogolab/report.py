"""ExperimentReport and its JSON / CSV encodings.

JSON is canonical.  Floats are written with 17 significant digits so a
report read back compares equal to the one written.  CSV is a single header
row plus a single value row: the fixed columns followed by every metric in
sorted key order.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

CHECK_PREFIX = "check."


def _float_token(x: float) -> str:
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Infinity" if x > 0 else "-Infinity"
    return format(x, ".17g")


def _encode(obj: Any) -> str:
    if isinstance(obj, bool) or obj is None or isinstance(obj, (str, int)):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, float):
        return _float_token(obj)
    if isinstance(obj, Mapping):
        items = (f"{json.dumps(str(k), ensure_ascii=False)}: {_encode(v)}" for k, v in obj.items())
        return "{" + ", ".join(items) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    if hasattr(obj, "item"):
        return _encode(obj.item())
    raise TypeError(f"cannot encode {type(obj).__name__}")


@dataclass(frozen=True)
class ExperimentReport:
    name: str
    params: dict[str, Any]
    seed: int | None
    metrics: dict[str, float]
    bound: float | None
    passed: bool
    runtime_ms: float = 0.0
    notes: tuple[str, ...] = field(default=())

    @classmethod
    def from_checks(
        cls,
        name: str,
        params: Mapping[str, Any],
        seed: int | None,
        metrics: Mapping[str, float],
        checks: Mapping[str, bool],
        bound: float | None = None,
        notes: tuple[str, ...] = (),
        runtime_ms: float = 0.0,
    ) -> "ExperimentReport":
        """Build a report whose pass flag is the conjunction of named checks.

        Each check is stored as a 0/1 metric under "check.<name>", so the
        flag can always be recomputed from the metrics alone.
        """
        merged = {k: float(v) for k, v in metrics.items()}
        for key, ok in checks.items():
            merged[CHECK_PREFIX + key] = 1.0 if ok else 0.0
        passed = all(bool(ok) for ok in checks.values())
        return cls(name, dict(params), seed, merged, bound, passed, runtime_ms, tuple(notes))

    def failed_checks(self) -> list[str]:
        return [k[len(CHECK_PREFIX):] for k, v in self.metrics.items() if k.startswith(CHECK_PREFIX) and v != 1.0]

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "params": dict(self.params),
            "seed": self.seed,
            "metrics": dict(self.metrics),
            "bound": self.bound,
            "passed": self.passed,
            "runtime_ms": self.runtime_ms,
            "notes": list(self.notes),
        }

    def to_json(self) -> str:
        return _encode(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> "ExperimentReport":
        d = json.loads(text)
        return cls(
            name=d["name"],
            params=d["params"],
            seed=d["seed"],
            metrics={k: float(v) for k, v in d["metrics"].items()},
            bound=None if d["bound"] is None else float(d["bound"]),
            passed=bool(d["passed"]),
            runtime_ms=float(d["runtime_ms"]),
            notes=tuple(d.get("notes", ())),
        )

    def to_csv(self) -> str:
        keys = sorted(self.metrics)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "seed", "passed", "bound", "runtime_ms", *keys])
        bound = "" if self.bound is None else _float_token(self.bound)
        w.writerow(
            [self.name, self.seed, int(self.passed), bound, _float_token(self.runtime_ms)]
            + [_float_token(self.metrics[k]) for k in keys]
        )
        return buf.getvalue()

    def comparable(self) -> dict[str, Any]:
        """Everything except wall-clock time, for reproducibility checks."""
        d = self.to_dict()
        d.pop("runtime_ms")
        return d
