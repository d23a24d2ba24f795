"""Machine- and human-readable run reports for CLI check suites."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

VERSION = "0.1.0"


@dataclass
class CheckResult:
    name: str
    status: str  # 'pass' or 'fail'
    witness: str = ""


@dataclass
class RunReport:
    command: str
    inputs_digest: str
    seed: int
    checks: list = field(default_factory=list)
    version: str = VERSION

    @staticmethod
    def digest_inputs(blobs) -> str:
        h = hashlib.sha256()
        for blob in blobs:
            if isinstance(blob, str):
                blob = blob.encode()
            h.update(blob)
            h.update(b"\x00")
        return h.hexdigest()[:16]

    def add(self, name: str, ok: bool, witness: str = ""):
        self.checks.append(CheckResult(name, "pass" if ok else "fail", witness))

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.checks)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
            "version": self.version,
            "checks": [
                {"name": c.name, "status": c.status, "witness": c.witness}
                for c in sorted(self.checks, key=lambda c: c.name)
            ],
            "passed": self.passed,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [f"# {self.command} (seed {self.seed}, inputs {self.inputs_digest})"]
        for c in sorted(self.checks, key=lambda c: c.name):
            mark = "PASS" if c.status == "pass" else "FAIL"
            suffix = f"  -- {c.witness}" if c.witness else ""
            lines.append(f"{mark} {c.name}{suffix}")
        lines.append("all checks passed" if self.passed else "CHECKS FAILED")
        return "\n".join(lines) + "\n"
