"""Regenerate the committed golden files (ring dimensions n <= 5, Poincare n <= 8)."""

from pathlib import Path

from permutohedral.cli import dumps, golden_data

GOLDEN = Path(__file__).resolve().parents[1] / "src" / "permutohedral" / "golden"

if __name__ == "__main__":
    for name, data in golden_data().items():
        (GOLDEN / name).write_text(dumps(data))
        print(f"wrote {GOLDEN / name}")
