from __future__ import annotations

import pytest

from pmrsim.device import DeviceConfig
from pmrsim.pmr import default_plan


@pytest.fixture
def config() -> DeviceConfig:
    return DeviceConfig()


@pytest.fixture
def plan():
    return default_plan()
