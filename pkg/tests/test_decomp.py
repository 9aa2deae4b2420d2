import pytest

from helmsweep.strips import build_strips


def test_reference_partition():
    d = build_strips(100, 4, 4)
    assert d.cuts == (0, 25, 50, 75, 100)
    assert d.spans == ((0, 27), (23, 52), (48, 77), (73, 100))
    assert d.width_bound_ok


def test_two_strip_partition():
    d = build_strips(20, 2, 2)
    assert d.spans == ((0, 11), (9, 20))
    # interfaces live on the strip edges inside the neighbor
    assert d.left_interface(2) == 9
    assert d.right_interface(1) == 11


def test_interfaces_and_ownership():
    d = build_strips(100, 4, 4)
    for i in range(2, 5):
        g = d.left_interface(i)
        a, b = d.spans[i - 2]
        # interface column interior to the left neighbor
        assert a <= g - 1 and g + 1 <= b
    for i in range(1, 4):
        g = d.right_interface(i)
        a, b = d.spans[i]
        assert a <= g - 1 and g + 1 <= b
    # owned column ranges tile [0, nx] without gaps
    lo, hi = d.owned_columns(1)
    assert lo == 0
    for i in range(2, 5):
        lo2, hi2 = d.owned_columns(i)
        assert lo2 == hi
        hi = hi2
    assert hi == d.nx + 1


def test_overlap_depth():
    d = build_strips(100, 4, 4)
    for i in range(3):
        a_next = d.spans[i + 1][0]
        b_prev = d.spans[i][1]
        assert b_prev - a_next == 4


def test_width_bound_violation_raises():
    with pytest.raises(ValueError, match="twice the overlap"):
        build_strips(40, 4, 8)


def test_width_bound_waivable():
    with pytest.warns(UserWarning, match="twice the overlap"):
        d = build_strips(40, 4, 8, enforce_width_bound=False)
    assert not d.width_bound_ok
    assert d.nstrips == 4


def test_thin_strips_with_large_overlap_rejected():
    # cut spacing 2.5 cells against 4 overlap cells: interfaces would leave
    # the domain no matter what the width flag says
    with pytest.raises(ValueError, match="leaves the domain"):
        build_strips(20, 8, 4, enforce_width_bound=False)


def test_rejects_odd_or_tiny_overlap():
    with pytest.raises(ValueError):
        build_strips(100, 4, 3)
    with pytest.raises(ValueError):
        build_strips(100, 4, 0)


def test_rejects_interface_leaving_domain():
    # one cell per strip: even the smallest overlap pushes interfaces out
    with pytest.raises(ValueError):
        build_strips(8, 8, 2, enforce_width_bound=False)


def test_rejects_single_strip():
    with pytest.raises(ValueError, match="at least 2"):
        build_strips(100, 1, 4)
