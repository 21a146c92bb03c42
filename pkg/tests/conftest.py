import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from gapcensus import RingContext, unit_group


@pytest.fixture
def ring30():
    return RingContext(30)


@pytest.fixture
def u30(ring30):
    return unit_group(ring30)
