import pytest

from spherepts import lattice


@pytest.fixture(scope="session")
def enum():
    """Session cache of enumerations so repeated test cases stay cheap."""
    cache: dict[tuple[int, int], lattice.SolutionSet] = {}

    def get(n: int, dim: int = 3) -> lattice.SolutionSet:
        key = (n, dim)
        if key not in cache:
            cache[key] = lattice.enumerate_solutions(n, dim)
        return cache[key]

    return get
