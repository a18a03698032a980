from __future__ import annotations

import pytest
from hypothesis import settings

from lpa_ugn.library import bundled

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def load():
    return bundled
