import calendar_util as cu


def test_leap_common(chk):
    chk.equal("2024", True, cu.is_leap(2024))
    chk.equal("2023", False, cu.is_leap(2023))


def test_leap_century(chk):
    chk.equal("1900", False, cu.is_leap(1900))
    chk.equal("2100", False, cu.is_leap(2100))


def test_leap_quad_century(chk):
    chk.equal("2000", True, cu.is_leap(2000))


def test_days(chk):
    chk.near("1900", 365.0, cu.days_in_year(1900))
    chk.near("2024", 366.0, cu.days_in_year(2024))
