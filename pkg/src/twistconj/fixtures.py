"""Small named groups used by the sweeps and the test-suite."""

from __future__ import annotations

import itertools

from twistconj.groups import FiniteGroup, build_cayley, perm_closure


def cyclic(n: int) -> FiniteGroup:
    table = [[(i + j) % n for j in range(n)] for i in range(n)]
    return build_cayley(n, table, name=f"Z/{n}")


def abelian(moduli) -> FiniteGroup:
    """Direct product of cyclic groups, elements in mixed-radix order
    (last coordinate fastest)."""
    moduli = tuple(int(m) for m in moduli)
    elems = list(itertools.product(*(range(m) for m in moduli)))
    pos = {e: i for i, e in enumerate(elems)}
    table = [[pos[tuple((x + y) % m for x, y, m in zip(a, b, moduli))] for b in elems]
             for a in elems]
    labels = [" ".join(map(str, e)) for e in elems]
    name = " x ".join(f"Z/{m}" for m in moduli) or "1"
    return build_cayley(len(elems), table, labels=labels, name=name)


def symmetric(n: int) -> FiniteGroup:
    if n == 1:
        return build_cayley(1, [[0]], name="S_1")
    gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return perm_closure(n, gens).to_finite_group(name=f"S_{n}")


def alternating(n: int) -> FiniteGroup:
    """Generated by the 3-cycles (0 1 k), k = 2 .. n-1."""
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = 1, k, 0
        gens.append(tuple(p))
    return perm_closure(n, gens).to_finite_group(name=f"A_{n}")


def dihedral(m: int) -> FiniteGroup:
    """Dihedral group of order ``2m`` acting on the vertices of an m-gon
    (``m >= 3``)."""
    if m < 3:
        raise ValueError("use abelian((2, 2)) or cyclic(2) for m < 3")
    rot = tuple((i + 1) % m for i in range(m))
    ref = tuple((-i) % m for i in range(m))
    return perm_closure(m, [rot, ref]).to_finite_group(name=f"D_{m}")


_QUAT_UNITS = ("1", "i", "j", "k")
# unit products as (sign, unit): row * column
_QUAT_MUL = {
    ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
    ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
    ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
    ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
}


def quaternion() -> FiniteGroup:
    elems = [(s, u) for u in _QUAT_UNITS for s in (1, -1)]
    pos = {e: i for i, e in enumerate(elems)}
    table = []
    for s1, u1 in elems:
        row = []
        for s2, u2 in elems:
            s, u = _QUAT_MUL[(u1, u2)]
            row.append(pos[(s1 * s2 * s, u)])
        table.append(row)
    labels = [("" if s > 0 else "-") + u for s, u in elems]
    return build_cayley(8, table, labels=labels, name="Q_8")


def sweep_groups() -> list[FiniteGroup]:
    """The bundled fixture groups of order at most 24."""
    groups = [cyclic(n) for n in range(2, 13)]
    groups += [symmetric(3), symmetric(4), dihedral(4), quaternion(), alternating(4)]
    return groups
