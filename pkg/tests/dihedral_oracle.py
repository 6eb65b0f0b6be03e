"""Independent arithmetic for the infinite dihedral group and its finite
dihedral quotients, used as a test oracle.

Elements are pairs ``(s, k)`` standing for ``b^s a^k`` with ``b^2 = 1`` and
``b^-1 a b = a^-1``.
"""

from __future__ import annotations

import re


def mul(u, v, m=0):
    s1, k1 = u
    s2, k2 = v
    k = (-k1 if s2 else k1) + k2
    return ((s1 + s2) % 2, k % m if m else k)


def inv(u, m=0):
    s, k = u
    out = (s, k) if s else (0, -k)
    return (out[0], out[1] % m) if m else out


def from_word(text, m=0):
    """Evaluate a word such as ``b a^-2`` or ``1``."""
    u = (0, 0)
    for name, exp in re.findall(r"([ab])(?:\^(-?\d+))?", text):
        e = int(exp) if exp else 1
        letter = (1, 0) if name == "b" else (0, 1)
        if e < 0:
            letter, e = inv(letter, m), -e
        for _ in range(e):
            u = mul(u, letter, m)
    return (u[0], u[1] % m) if m else u


def phi_of(u, twist, m=0):
    """Identity, or ``a -> a^-1, b -> b`` when ``twist``."""
    s, k = u
    if not twist:
        return u
    return (s, (-k) % m if m else -k)


def twisted_class(x, twist, m):
    elems = [(s, k) for s in (0, 1) for k in range(m)]
    return {mul(mul(g, x, m), inv(phi_of(g, twist, m), m), m) for g in elems}


def separated_in_quotients(x, y, twist, moduli=range(2, 13)):
    """Smallest ``m`` with the images of ``x`` and ``y`` in different
    twisted classes of ``D_m``, or None."""
    for m in moduli:
        xm = (x[0], x[1] % m)
        ym = (y[0], y[1] % m)
        if ym not in twisted_class(xm, twist, m):
            return m
    return None


def ball(radius):
    out = {(0, 0)}
    layer = {(0, 0)}
    gens = [(1, 0), (0, 1), (0, -1)]
    for _ in range(radius):
        layer = {mul(u, g) for u in layer for g in gens} - out
        out |= layer
    return out


def conjugate_in_ball(x, y, twist, radius=6):
    for g in sorted(ball(radius)):
        if mul(mul(g, x), inv(phi_of(g, twist))) == y:
            return g
    return None


def verdict(x, y, twist):
    """True (conjugate), False (separated) or None (undetermined)."""
    if conjugate_in_ball(x, y, twist) is not None:
        return True
    if separated_in_quotients(x, y, twist) is not None:
        return False
    return None
