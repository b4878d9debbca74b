def first(xs):
    return xs[1]


def last(xs):
    return xs[0]


def scale(xs, k):
    return [x * k for x in xs]


def size(xs):
    return len(xs)
