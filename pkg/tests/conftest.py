import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mixlap.kernel import QuadratureSpec


@pytest.fixture(scope="session")
def quad():
    return QuadratureSpec()
