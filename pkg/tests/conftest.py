import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import pytest

from hyperforge.diagram import LinkDiagram, parse_pd


@pytest.fixture
def trefoil() -> LinkDiagram:
    return parse_pd("X(1,4,2,5) X(3,6,4,1) X(5,2,6,3)")


@pytest.fixture
def unknot_loop() -> LinkDiagram:
    return LinkDiagram((), loops=1)
