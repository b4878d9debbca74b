import intervals as iv


def test_overlapping(chk):
    chk.equal("inner", True, iv.overlaps((0, 5), (2, 3)))
    chk.equal("cross", True, iv.overlaps((0, 5), (4, 9)))


def test_disjoint(chk):
    chk.equal("left", False, iv.overlaps((0, 2), (5, 9)))
    chk.equal("right", False, iv.overlaps((6, 8), (1, 3)))


def test_touching(chk):
    chk.equal("edge", False, iv.overlaps((0, 2), (2, 4)))


def test_length(chk):
    chk.near("len", 4.0, iv.length((3, 7)))


def test_merge(chk):
    chk.equal("merged", (0, 9), iv.merge((0, 5), (4, 9)))
