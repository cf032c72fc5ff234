import sys
from pathlib import Path

import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("suite", deadline=None, max_examples=50)
settings.load_profile("suite")


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Keep spectrum cache files out of the real home directory."""
    monkeypatch.setenv("OMNILAT_CACHE_DIR", str(tmp_path / "cache"))
