import pytest

from qtanner import cayley, codes, tanner

A13 = [1, 12, 5, 8]


@pytest.fixture(scope="session")
def ref_code():
    """Z13, delta 4, rho 1/4: the n = 208 instance used throughout."""
    g = cayley.build_group("cyclic", 13)
    cx = cayley.build_complex(g, A13, A13)
    return tanner.build_tanner_code(cx, codes.repetition_code(4), codes.parity_code(4))


@pytest.fixture(scope="session")
def tiny_code():
    """Z3, delta 2, rep_2 locals: small enough for exact reduced weights."""
    g = cayley.build_group("cyclic", 3)
    cx = cayley.build_complex(g, [1, 2], [1, 2])
    return tanner.build_tanner_code(cx, codes.repetition_code(2), codes.repetition_code(2))


@pytest.fixture(scope="session")
def z5_code():
    """Z5, delta 2, C_B the full space: H_Z is empty (degenerate but legal)."""
    g = cayley.build_group("cyclic", 5)
    cx = cayley.build_complex(g, [1, 4], [1, 4])
    return tanner.build_tanner_code(cx, codes.repetition_code(2), codes.full_space(2))


@pytest.fixture(scope="session")
def unique_code():
    """Z8, delta 3, rep_3 locals: distinct local-check columns give unique
    weight-1 coset leaders, so isolated errors decode exactly."""
    g = cayley.build_group("cyclic", 8)
    cx = cayley.build_complex(g, [1, 7, 4], [1, 7, 4])
    return tanner.build_tanner_code(cx, codes.repetition_code(3), codes.repetition_code(3))
