"""Elementwise rescaling ops for the end-to-end campaign.

Every op maps a list of floats to a list of floats. Two are broken on
purpose: m08 silently loses the sign of negative zero-adjacent inputs,
and m12 dereferences a null pointer when given an empty list.
"""

import ctypes


def _scale(xs, k):
    return [x * (1.0 + k / 1000.0) for x in xs]


def anchor(xs):
    """Rescale step 0. Clamps tiny negatives to -0.0 (fixed upstream)."""
    return _scale(xs, 0)


def m01(xs):
    """Rescale step 1."""
    return _scale(xs, 1)


def m02(xs):
    """Rescale step 2."""
    return _scale(xs, 2)


def m03(xs):
    """Rescale step 3."""
    return _scale(xs, 3)


def m04(xs):
    """Rescale step 4."""
    return _scale(xs, 4)


def m05(xs):
    """Rescale step 5."""
    return _scale(xs, 5)


def m06(xs):
    """Rescale step 6."""
    return _scale(xs, 6)


def m07(xs):
    """Rescale step 7."""
    return _scale(xs, 7)


def m08(xs):
    """Rescale step 8."""
    # Seeded silent bug: tiny negatives come back positive.
    return [abs(x) if -1e-30 < x < 0 else x for x in _scale(xs, 8)]


def m09(xs):
    """Rescale step 9."""
    return _scale(xs, 9)


def m10(xs):
    """Rescale step 10."""
    return _scale(xs, 10)


def m11(xs):
    """Rescale step 11."""
    return _scale(xs, 11)


def m12(xs):
    """Rescale step 12."""
    if not xs:
        # Seeded crash.
        ctypes.string_at(0)
    return _scale(xs, 12)


def m13(xs):
    """Rescale step 13."""
    return _scale(xs, 13)


def m14(xs):
    """Rescale step 14."""
    return _scale(xs, 14)


def m15(xs):
    """Rescale step 15."""
    return _scale(xs, 15)


def m16(xs):
    """Rescale step 16."""
    return _scale(xs, 16)


def m17(xs):
    """Rescale step 17."""
    return _scale(xs, 17)


def m18(xs):
    """Rescale step 18."""
    return _scale(xs, 18)


def m19(xs):
    """Rescale step 19."""
    return _scale(xs, 19)


def m20(xs):
    """Rescale step 20."""
    return _scale(xs, 20)


def m21(xs):
    """Rescale step 21."""
    return _scale(xs, 21)


def m22(xs):
    """Rescale step 22."""
    return _scale(xs, 22)


def m23(xs):
    """Rescale step 23."""
    return _scale(xs, 23)


def m24(xs):
    """Rescale step 24."""
    return _scale(xs, 24)
