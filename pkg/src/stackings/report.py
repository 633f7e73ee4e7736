"""Violation reports shared by every checker."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Violation:
    tag: str
    message: str
    cells: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return {"tag": self.tag, "message": self.message, "cells": list(self.cells)}


@dataclass
class Report:
    """Outcome of a check.

    ``horizon`` collects items that could not be decided because the data
    they need lies outside a truncated cover ball; they are not failures.
    """

    violations: list[Violation] = field(default_factory=list)
    horizon: list[str] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    @property
    def inconclusive(self) -> bool:
        return self.ok and self.checked == 0 and bool(self.horizon)

    def add(self, tag: str, message: str, *cells: str) -> None:
        self.violations.append(Violation(tag, message, tuple(cells)))

    def extend(self, other: "Report") -> None:
        self.violations.extend(other.violations)
        self.horizon.extend(other.horizon)
        self.checked += other.checked

    def tags(self) -> set[str]:
        return {v.tag for v in self.violations}

    def sorted(self) -> "Report":
        def key(v: Violation):
            head, _, tail = v.tag.partition(".")
            return (head, int(tail) if tail.isdigit() else 0, tail, v.cells, v.message)

        return Report(sorted(self.violations, key=key), sorted(self.horizon), self.checked)

    def __iter__(self):
        return iter(self.violations)

    def __len__(self) -> int:
        return len(self.violations)
