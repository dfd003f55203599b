import os

import pytest

from multiwit import RandomSource, TrackOptions

SEED = 20230529

# Long-running optional checks are opt-in via environment flags:
#   MULTIWIT_EXTENDED=1   enables the multi-minute optional checks
#   MULTIWIT_PENTAD=1     enables the multi-hour pentad count
extended = pytest.mark.skipif(
    os.environ.get("MULTIWIT_EXTENDED") != "1",
    reason="set MULTIWIT_EXTENDED=1 to run the long optional checks",
)
pentad_gate = pytest.mark.skipif(
    os.environ.get("MULTIWIT_PENTAD") != "1",
    reason="set MULTIWIT_PENTAD=1 to run the multi-hour pentad count",
)


@pytest.fixture(scope="session")
def opts():
    """Tracking options shared by the heavier tests."""
    return TrackOptions(workers=4)


def rs(stream: int) -> RandomSource:
    return RandomSource(seed=SEED, stream=stream)
