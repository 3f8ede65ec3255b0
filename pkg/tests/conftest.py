import sys
from pathlib import Path

import pytest

# Make the helper modules (synthdata, naive_reference) importable when
# pytest is run from the repository root.
sys.path.insert(0, str(Path(__file__).parent))

from synthdata import build_iteration_spec  # noqa: E402


@pytest.fixture(scope="session")
def iteration_spec():
    return build_iteration_spec()


def pass_line(name: str) -> None:
    """One visible pass line per acceptance criterion (run with -s to see)."""
    print(f"PASS {name}")
