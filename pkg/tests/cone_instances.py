"""Generated functor pairs for the cone-calculus checks.

Instances are concrete: objects carry small finite sets, arrows are
functions, and declared relation-generators are the graphs of all arrows
together with their transposes (these generate every relation through
composition and joins, since points are available via the terminal object
or constants).
"""

import itertools

from finloc.tannaka import Arrow, Cone, FunctorPair


def _with_rels(objects, maps, F, Fmap, Fp=None, Fpmap=None, **kw):
    fp = FunctorPair(objects, maps, F, Fmap, Fp, Fpmap, **kw)
    rels = []
    for a in fp.maps:
        gF = frozenset((x, fp.Fmap[a.name][x]) for x in fp.F[a.src])
        gFp = frozenset((x, fp.Fpmap[a.name][x]) for x in fp.Fp[a.src])
        rels.append((a.name, a.src, a.dst, gF, gFp))
        rels.append((a.name + "^op", a.dst, a.src,
                     frozenset((v, u) for (u, v) in gF),
                     frozenset((v, u) for (u, v) in gFp)))
    fp.rels = tuple(rels)
    return fp


def single_arrow_instances():
    """All functor pairs on the one-arrow category with carriers <= 3,
    with the second functor a relabeling of the first."""
    out = []
    for na in (1, 2):
        for nb in (1, 2, 3):
            A = tuple(range(na))
            B = tuple(f"b{i}" for i in range(nb))
            for values in itertools.product(B, repeat=na):
                fmap = dict(zip(A, values))
                # relabeled second functor via a cyclic shift on B
                shift = {b: B[(i + 1) % nb] for i, b in enumerate(B)}
                out.append(_with_rels(
                    ("A", "B"), (Arrow("m", "A", "B"),),
                    {"A": A, "B": B}, {"m": fmap},
                    Fp={"A": A, "B": B},
                    Fpmap={"m": {x: shift[fmap[x]] for x in A}},
                ))
                out.append(_with_rels(
                    ("A", "B"), (Arrow("m", "A", "B"),),
                    {"A": A, "B": B}, {"m": fmap},
                ))
    return out


def parallel_pair_instances():
    out = []
    A, B = (0, 1), ("u", "v")
    maps = list(itertools.product(B, repeat=2))
    for f in maps:
        for g in maps:
            out.append(_with_rels(
                ("A", "B"),
                (Arrow("f", "A", "B"), Arrow("g", "A", "B")),
                {"A": A, "B": B},
                {"f": dict(zip(A, f)), "g": dict(zip(A, g))},
            ))
    return out


def chain_instances():
    """Three objects with a composable pair of arrows and their composite."""
    out = []
    A, B, C = (0, 1), ("u", "v"), ("p", "q", "r")
    for f in itertools.product(B, repeat=2):
        for g in itertools.product(C, repeat=2):
            fm = dict(zip(A, f))
            gm = dict(zip(B, g))
            out.append(_with_rels(
                ("A", "B", "C"),
                (Arrow("f", "A", "B"), Arrow("g", "B", "C"),
                 Arrow("gf", "A", "C")),
                {"A": A, "B": B, "C": C},
                {"f": fm, "g": gm, "gf": {x: gm[fm[x]] for x in A}},
            ))
    return out


def full_finset_instance(n):
    """A category on {X, X x X, 1} with products and terminal object.

    Arrows: every function with source or target X or 1, plus the
    endomaps of the product generated by pairings of projections and
    constants (the full endomap set only blows up the arrow count without
    adding cone content: pairings generate them under the product laws).
    """
    X = tuple(range(n))
    XX = tuple(itertools.product(X, repeat=2))
    ONE = ("*",)
    carriers = {"X": X, "XX": XX, "1": ONE}
    maps = []
    fmap = {}
    counter = 0

    def add(src, dst, f):
        nonlocal counter
        name = f"a{counter}"
        counter += 1
        maps.append(Arrow(name, src, dst))
        fmap[name] = dict(f)

    for src, dst in (("X", "X"), ("X", "XX"), ("XX", "X"),
                     ("1", "X"), ("1", "XX")):
        for values in itertools.product(carriers[dst],
                                        repeat=len(carriers[src])):
            add(src, dst, dict(zip(carriers[src], values)))
    for src in carriers:
        add(src, "1", {x: "*" for x in carriers[src]})
    legs = [{p: p[0] for p in XX}, {p: p[1] for p in XX}]
    legs += [{p: x for p in XX} for x in X]
    for u in legs:
        for v in legs:
            add("XX", "XX", {p: (u[p], v[p]) for p in XX})
    fp = _with_rels(tuple(carriers), tuple(maps), carriers, fmap,
                    products={"XX": ("X", "X")}, terminal="1")
    return fp


def perm_products_instance(n=2):
    """Products and terminal with only invertible generating maps on X:
    permutations, pairings of permutations, projections, and the terminal
    maps.  Richer diamond-cones live here than with constants around."""
    X = tuple(range(n))
    XX = tuple(itertools.product(X, repeat=2))
    ONE = ("*",)
    carriers = {"X": X, "XX": XX, "1": ONE}
    maps = []
    fmap = {}
    counter = 0

    def add(src, dst, f):
        nonlocal counter
        name = f"p{counter}"
        counter += 1
        maps.append(Arrow(name, src, dst))
        fmap[name] = dict(f)

    perms = [dict(zip(X, p)) for p in itertools.permutations(X)]
    for f in perms:
        add("X", "X", f)
    for f in perms:
        for g in perms:
            add("X", "XX", {x: (f[x], g[x]) for x in X})
    add("XX", "X", {p: p[0] for p in XX})
    add("XX", "X", {p: p[1] for p in XX})
    for f in perms:
        for g in perms:
            add("XX", "XX", {p: (f[p[0]], g[p[1]]) for p in XX})
    for src in carriers:
        add(src, "1", {x: "*" for x in carriers[src]})
    return _with_rels(tuple(carriers), tuple(maps), carriers, fmap,
                      products={"XX": ("X", "X")}, terminal="1")


def all_cones(fp, H):
    """Every H-valued cone on the pair; caller keeps the bit count small."""
    keys = []
    for o in fp.objects:
        for x in fp.F[o]:
            for y in fp.Fp[o]:
                keys.append((o, x, y))
    for values in itertools.product(H.elements, repeat=len(keys)):
        tables = {o: {} for o in fp.objects}
        for (o, x, y), v in zip(keys, values):
            tables[o][(x, y)] = v
        yield Cone(fp, H, tables)
