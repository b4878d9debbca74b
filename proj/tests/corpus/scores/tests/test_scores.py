import scores


def test_percent_half(chk):
    chk.near("half", 50.0, scores.percent(30, 60), 1e-9)


def test_percent_capped(chk):
    chk.near("cap", 100.0, scores.percent(120, 100), 1e-9)


def test_percent_zero_total(chk):
    chk.near("zero", 0.0, scores.percent(5, 0))


def test_passed(chk):
    chk.equal("yes", True, scores.passed(8, 10))
    chk.equal("no", False, scores.passed(2, 10))
