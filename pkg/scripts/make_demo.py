"""Regenerates the checked-in demo inputs under demo/.

Usage: python scripts/make_demo.py [output-dir]
"""

import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "tests"))

from synthdata import standard_fixture  # noqa: E402


def main():
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("demo")
    config = standard_fixture(target, n_records=800, seed=20260810)
    print(f"wrote demo inputs and {config}")


if __name__ == "__main__":
    main()
