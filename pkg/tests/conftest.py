import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from cablesteer.elastica import CableProperties


@pytest.fixture
def props():
    return CableProperties(L=0.5, EI=0.0027)


@pytest.fixture
def unit_props():
    return CableProperties(L=1.0, EI=1.0)
