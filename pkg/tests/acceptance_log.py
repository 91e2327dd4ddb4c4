"""Collects the one-line verdicts printed by the acceptance suite."""
LINES: list[str] = []


def record(number: int, ok: bool, detail: str) -> str:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}"
    LINES.append(line)
    print(line)
    return line
