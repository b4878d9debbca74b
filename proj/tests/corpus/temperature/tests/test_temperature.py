import temperature as t


def test_c_to_f_freezing(chk):
    chk.near("zero", 32.0, t.c_to_f(0), 1e-9)


def test_c_to_f_boiling(chk):
    chk.near("hundred", 212.0, t.c_to_f(100), 1e-9)


def test_c_to_f_negative(chk):
    chk.near("minus40", -40.0, t.c_to_f(-40), 1e-9)


def test_f_to_c(chk):
    chk.near("body", 37.0, t.f_to_c(98.6), 1e-6)
    chk.near("zero", 0.0, t.f_to_c(32), 1e-9)


def test_describe(chk):
    chk.equal("cold", "freezing", t.describe(-5))
    chk.equal("mild", "mild", t.describe(10))
    chk.equal("hot", "hot", t.describe(30))
