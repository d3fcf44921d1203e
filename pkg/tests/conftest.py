"""Shared instance builders for the test suite."""

import pytest

from maxminfair import validate_instance


def make_instance(values, desires, players=None):
    """Terse builder: values maps resource -> rational, desires player -> list."""
    players = list(players) if players is not None else list(desires)
    return validate_instance(
        {
            "players": players,
            "resources": [{"id": r, "value": v} for r, v in values.items()],
            "desires": {p: list(rs) for p, rs in desires.items()},
        }
    )


@pytest.fixture
def two_fat():
    """Two players, two unit-value resources, both desired by both."""
    return make_instance(
        {"a": "1", "b": "1"},
        {"p1": ["a", "b"], "p2": ["a", "b"]},
    )


@pytest.fixture
def shared_single():
    """Two players fighting over one unit-value resource."""
    return make_instance(
        {"r": "1"},
        {"p1": ["r"], "p2": ["r"]},
    )


@pytest.fixture
def thin_chain():
    """Two players, four thin resources of value 3/23; p2 only reaches t1, t2."""
    return make_instance(
        {"t1": "3/23", "t2": "3/23", "t3": "3/23", "t4": "3/23"},
        {"p1": ["t1", "t2", "t3", "t4"], "p2": ["t1", "t2"]},
    )


@pytest.fixture
def ten_thin():
    """One player, ten resources of value 1/10."""
    ids = [f"r{i}" for i in range(1, 11)]
    return make_instance(
        {r: "1/10" for r in ids},
        {"p": ids},
    )
