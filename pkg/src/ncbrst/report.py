"""Check results shared by the verification routines and the CLI."""
from __future__ import annotations

from dataclasses import dataclass, field

PASS, FAIL, FINDING = "PASS", "FAIL", "FINDING"


@dataclass
class Check:
    name: str
    status: str
    detail: str = ""
    witness: object = None

    def as_dict(self):
        d = {"name": self.name, "status": self.status, "detail": self.detail}
        if self.witness is not None:
            d["witness"] = self.witness
        return d


@dataclass
class Report:
    title: str
    checks: list = field(default_factory=list)
    data: dict = field(default_factory=dict)

    def add(self, name, ok, detail="", witness=None):
        status = ok if isinstance(ok, str) else (PASS if ok else FAIL)
        self.checks.append(Check(name, status, detail, witness))
        return self

    def extend(self, other: "Report", prefix=""):
        for c in other.checks:
            self.checks.append(Check(prefix + c.name, c.status, c.detail, c.witness))
        self.data.update(other.data)
        return self

    @property
    def ok(self):
        return all(c.status != FAIL for c in self.checks)

    def failures(self):
        return [c for c in self.checks if c.status == FAIL]

    def __bool__(self):
        return self.ok

    def as_dict(self):
        return {"title": self.title, "checks": [c.as_dict() for c in self.checks], "data": self.data}

    def __str__(self):
        lines = [self.title]
        for c in self.checks:
            lines.append(f"  [{c.status}] {c.name}" + (f": {c.detail}" if c.detail else ""))
        return "\n".join(lines)
