import sys
from pathlib import Path

import pytest

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

sys.path.insert(0, str(Path(__file__).resolve().parent))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    if not FIXTURES.exists() or not any(FIXTURES.iterdir()):
        from sitefold.fixtures import write_all

        write_all(FIXTURES)
    return FIXTURES
