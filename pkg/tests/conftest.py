import pytest

from helpers import FIXTURES


@pytest.fixture(scope="session")
def cj_cgv_raw() -> bytes:
    return (FIXTURES / "cj_cgv_feed.jsonl").read_bytes()


@pytest.fixture(scope="session")
def skew_paths() -> dict:
    return {
        "ratings": FIXTURES / "skew" / "ratings.jsonl",
        "humans": FIXTURES / "skew" / "humans.jsonl",
    }
