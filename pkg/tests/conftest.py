import pytest

from maassqv.quadfield import make_field


@pytest.fixture(scope="session")
def F21():
    return make_field(21)


@pytest.fixture(scope="session")
def admitted_fields():
    """All fields in the small candidate set that pass validation."""
    out = []
    for D in (21, 33, 57, 69, 77, 93):
        try:
            out.append(make_field(D))
        except Exception:
            pass
    return out
