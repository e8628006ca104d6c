"""Golden CLI invocations. Run this file to regenerate tests/golden/."""

from __future__ import annotations

import subprocess
import sys
from pathlib import Path

HERE = Path(__file__).resolve().parent
GOLDEN = HERE / "golden"
SYSTEMS = HERE.parent / "systems"

SHIPPED = ("s_sym", "s_pos", "s_two_prime")

COMMANDS: dict[str, list[str]] = {
    "classify": ["classify", "--x", "0"],
    "simulate": ["simulate", "--x0", "0", "--y0", "0.5", "--z0", "0.5", "--eps", "0.01", "--t-end", "0.5", "--samples", "11"],
    "layer": ["layer", "--x", "0", "--grid", "5"],
    "scan": ["scan"],
    "converge": ["converge", "--eps-list", "0.01,0.005", "--x0", "0", "--t-end", "1"],
}


def run_cli(args: list[str]) -> subprocess.CompletedProcess:
    return subprocess.run(
        [sys.executable, "-m", "filippov_lab.cli", *args],
        capture_output=True,
        cwd=HERE.parent,
    )


def invocation(system: str, command: str) -> list[str]:
    args = COMMANDS[command]
    return [args[0], "--system", f"systems/{system}.json", *args[1:]]


def render(proc: subprocess.CompletedProcess) -> bytes:
    """Exit code line followed by raw stdout."""
    return f"exit={proc.returncode}\n".encode() + proc.stdout


def golden_path(system: str, command: str) -> Path:
    return GOLDEN / f"{system}.{command}.txt"


if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    for s in SHIPPED:
        for c in COMMANDS:
            golden_path(s, c).write_bytes(render(run_cli(invocation(s, c))))
            print("wrote", golden_path(s, c).name)
