import pytest

from rakns.hierarchy import default_flow_table


@pytest.fixture(scope="session")
def table5():
    """Flow table through order 5, shared across the suite (exact, cached)."""
    return default_flow_table(5)
