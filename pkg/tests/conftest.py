import sys
from pathlib import Path

import pytest

from qjacobi.qcore import QContext

sys.path.insert(0, str(Path(__file__).parent))

# default point first; the other two probe a larger q and a negative order
PARAMS = [(0.5, 0.5), (0.7, 0.25), (0.5, -0.5)]


@pytest.fixture(params=PARAMS, ids=lambda p: f"q{p[0]}_nu{p[1]}")
def ctx(request):
    q, nu = request.param
    return QContext(q=q, nu=nu)


@pytest.fixture
def ctx0():
    return QContext()
