"""Finite sup-lattices, finite locales (frames), and their morphisms.

Elements are opaque hashable ids.  The order is stored as one bitmask per
element (its up-set over element indices); join and meet tables are
precomputed at validation time so every later check is a table lookup.
Carriers are capped (default 64) to keep all exhaustive checks fast.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Callable, Iterable

from .errors import (
    ConditionIFails,
    ConditionIIFails,
    DomainMismatch,
    MissingJoin,
    NotAFrame,
    NotAModule,
    NotAPartialOrder,
    SizeBound,
)

DEFAULT_CAP = 64


def _canon(elements) -> tuple:
    """Deterministic element order: natural sort when possible, repr otherwise."""
    elements = list(elements)
    try:
        return tuple(sorted(elements))
    except TypeError:
        return tuple(sorted(elements, key=repr))


@dataclass(frozen=True)
class Violation:
    """A law failure with the first witness in canonical element order."""

    kind: str
    witness: tuple

    def __bool__(self):  # a violation is truthy, `None` means ok
        return True


class FiniteSupLattice:
    """A finite poset with all joins (hence all meets): a complete lattice."""

    __slots__ = ("elements", "_ix", "_up", "_jn", "_mt", "_bot_i", "_top_i")

    def __init__(self, elements, up, jn, mt, bot_i, top_i):
        # Trusted constructor; use build_suplattice / from_order to validate.
        self.elements = elements
        self._ix = {e: i for i, e in enumerate(elements)}
        self._up = up
        self._jn = jn
        self._mt = mt
        self._bot_i = bot_i
        self._top_i = top_i

    # -- construction ---------------------------------------------------

    @classmethod
    def from_order(cls, elements, leq: Callable[[object, object], bool]):
        """Validate a reflexive order predicate and precompute all tables."""
        elements = tuple(elements)
        n = len(elements)
        ix = {e: i for i, e in enumerate(elements)}
        if len(ix) != n:
            raise NotAPartialOrder("duplicate element ids")
        up = [0] * n
        for i, e in enumerate(elements):
            m = 0
            for j, f in enumerate(elements):
                if leq(e, f):
                    m |= 1 << j
            if not (m >> i) & 1:
                raise NotAPartialOrder(f"order not reflexive at {e!r}", witness=(e,))
            up[i] = m
        for i in range(n):
            for j in range(n):
                if (up[i] >> j) & 1:
                    if i != j and (up[j] >> i) & 1:
                        raise NotAPartialOrder(
                            f"antisymmetry fails on {elements[i]!r}, {elements[j]!r}",
                            witness=(elements[i], elements[j]),
                        )
                    if up[j] & ~up[i]:
                        raise NotAPartialOrder(
                            f"transitivity fails at {elements[i]!r} <= {elements[j]!r}",
                            witness=(elements[i], elements[j]),
                        )
        full = (1 << n) - 1
        bot_i = next((i for i in range(n) if up[i] == full), None)
        if bot_i is None:
            raise MissingJoin("no least element (empty subset has no join)",
                              witness=frozenset())
        jn = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                ub = up[i] & up[j]
                k = _least_of(ub, up)
                if k is None:
                    raise MissingJoin(
                        f"{{{elements[i]!r}, {elements[j]!r}}} has no least upper bound",
                        witness=frozenset({elements[i], elements[j]}),
                    )
                jn[i][j] = jn[j][i] = k
        top_i = 0
        for i in range(n):
            top_i = jn[top_i][i]
        down = [0] * n
        for i in range(n):
            for j in range(n):
                if (up[j] >> i) & 1:
                    down[i] |= 1 << j
        mt = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                lb = down[i] & down[j]
                k = bot_i
                b = lb
                while b:
                    low = (b & -b).bit_length() - 1
                    k = jn[k][low]
                    b &= b - 1
                if not (lb >> k) & 1:  # join of lower bounds escaped the set
                    raise MissingJoin(
                        f"{{{elements[i]!r}, {elements[j]!r}}} has no greatest lower bound",
                        witness=frozenset({elements[i], elements[j]}),
                    )
                mt[i][j] = mt[j][i] = k
        return cls(elements, up, jn, mt, bot_i, top_i)

    # -- basic queries ----------------------------------------------------

    def index(self, x):
        try:
            return self._ix[x]
        except KeyError:
            raise DomainMismatch(f"{x!r} is not an element of this lattice") from None

    def __contains__(self, x):
        return x in self._ix

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def bottom(self):
        return self.elements[self._bot_i]

    @property
    def top(self):
        return self.elements[self._top_i]

    def leq(self, x, y) -> bool:
        return (self._up[self.index(x)] >> self.index(y)) & 1 == 1

    def join(self, x, y):
        return self.elements[self._jn[self.index(x)][self.index(y)]]

    def meet(self, x, y):
        return self.elements[self._mt[self.index(x)][self.index(y)]]

    def join_all(self, xs: Iterable):
        i = self._bot_i
        for x in xs:
            i = self._jn[i][self.index(x)]
        return self.elements[i]

    def meet_all(self, xs: Iterable):
        i = self._top_i
        for x in xs:
            i = self._mt[i][self.index(x)]
        return self.elements[i]

    def down_set(self, x):
        xi = self.index(x)
        return tuple(e for j, e in enumerate(self.elements) if (self._up[j] >> xi) & 1)

    def up_set(self, x):
        m = self._up[self.index(x)]
        return tuple(e for j, e in enumerate(self.elements) if (m >> j) & 1)

    def join_irreducibles(self) -> tuple:
        """Elements that are not the join of their strict down-set."""
        out = []
        for e in self.elements:
            if e == self.bottom:
                continue
            below = [d for d in self.down_set(e) if d != e]
            if self.join_all(below) != e:
                out.append(e)
        return tuple(out)

    def decompose(self, x) -> frozenset:
        """Canonical join-irreducible decomposition of `x`."""
        return frozenset(j for j in self.join_irreducibles() if self.leq(j, x))

    def __repr__(self):
        return f"<{type(self).__name__} {len(self.elements)} elements>"


def _least_of(mask: int, up) -> int | None:
    if mask == 0:
        return None
    b = mask
    while b:
        k = (b & -b).bit_length() - 1
        if up[k] & mask == mask:
            return k
        b &= b - 1
    return None


def build_suplattice(elements, leq_pairs, cap: int = DEFAULT_CAP) -> FiniteSupLattice:
    """Validated lattice from generating order pairs (reflexive-transitively closed)."""
    elements = _canon(elements)
    if len(elements) > cap:
        raise SizeBound(f"carrier size {len(elements)} exceeds cap {cap}")
    ix = {e: i for i, e in enumerate(elements)}
    if len(ix) != len(elements):
        raise NotAPartialOrder("duplicate element ids")
    n = len(elements)
    up = [1 << i for i in range(n)]
    for a, b in leq_pairs:
        if a not in ix or b not in ix:
            raise DomainMismatch(f"order pair ({a!r}, {b!r}) mentions unknown elements")
        up[ix[a]] |= 1 << ix[b]
    changed = True
    while changed:  # transitive closure (Warshall over bitmask rows)
        changed = False
        for i in range(n):
            m, b = up[i], up[i]
            while b:
                j = (b & -b).bit_length() - 1
                m |= up[j]
                b &= b - 1
            if m != up[i]:
                up[i] = m
                changed = True
    return FiniteSupLattice.from_order(
        elements, lambda x, y: (up[ix[x]] >> ix[y]) & 1 == 1
    )


def is_frame(L: FiniteSupLattice):
    """Finite frame law: a ∧ (y ∨ z) = (a ∧ y) ∨ (a ∧ z) for all triples.

    Returns (True, None) or (False, (a, y, z)) with the first bad triple.
    """
    els = L.elements
    mt, jn = L._mt, L._jn
    n = len(els)
    for ai in range(n):
        row = mt[ai]
        for yi in range(n):
            for zi in range(n):
                if row[jn[yi][zi]] != jn[row[yi]][row[zi]]:
                    return False, (els[ai], els[yi], els[zi])
    return True, None


class FiniteLocale(FiniteSupLattice):
    """A finite frame: finite meets distribute over all joins."""

    __slots__ = ()

    @classmethod
    def from_lattice(cls, L: FiniteSupLattice) -> "FiniteLocale":
        ok, witness = is_frame(L)
        if not ok:
            raise NotAFrame(
                f"meet does not distribute over join at {witness!r}", witness=witness
            )
        return cls(L.elements, L._up, L._jn, L._mt, L._bot_i, L._top_i)


def build_locale(elements, leq_pairs, cap: int = DEFAULT_CAP) -> FiniteLocale:
    return FiniteLocale.from_lattice(build_suplattice(elements, leq_pairs, cap))


@functools.lru_cache(maxsize=1)
def two() -> FiniteLocale:
    """The initial locale: the two-element frame 0 < 1."""
    return build_locale((0, 1), [(0, 1)])


# -- morphisms ------------------------------------------------------------


class SupMorphism:
    """An element-to-element map between lattices, intended to preserve joins."""

    __slots__ = ("dom", "cod", "table")

    def __init__(self, dom: FiniteSupLattice, cod: FiniteSupLattice, table: dict):
        missing = [x for x in dom.elements if x not in table]
        if missing:
            raise DomainMismatch(f"map undefined on {missing[0]!r}")
        for x, y in table.items():
            if x not in dom:
                raise DomainMismatch(f"{x!r} is not in the domain")
            if y not in cod:
                raise DomainMismatch(f"value {y!r} is not in the codomain")
        self.dom = dom
        self.cod = cod
        self.table = dict(table)

    def __call__(self, x):
        return self.table[x]

    def then(self, other: "SupMorphism") -> "SupMorphism":
        if other.dom is not self.cod and other.dom.elements != self.cod.elements:
            raise DomainMismatch("composition domains do not match")
        return SupMorphism(self.dom, other.cod,
                           {x: other.table[y] for x, y in self.table.items()})

    def __eq__(self, other):
        return (isinstance(other, SupMorphism) and self.table == other.table
                and self.dom.elements == other.dom.elements
                and self.cod.elements == other.cod.elements)

    def __hash__(self):
        return hash(tuple(sorted(self.table.items(), key=repr)))

    def __repr__(self):
        return f"<SupMorphism {len(self.dom)}->{len(self.cod)}>"


def identity_morphism(L: FiniteSupLattice) -> SupMorphism:
    return SupMorphism(L, L, {x: x for x in L.elements})


def check_sup_morphism(f: SupMorphism) -> Violation | None:
    """ok iff f preserves bottom and binary joins (hence all joins)."""
    dom, cod, t = f.dom, f.cod, f.table
    if t[dom.bottom] != cod.bottom:
        return Violation("bottom", (dom.bottom,))
    for x in dom.elements:
        for y in dom.elements:
            if t[dom.join(x, y)] != cod.join(t[x], t[y]):
                return Violation("join", (x, y))
    return None


def check_locale_morphism(f: SupMorphism) -> Violation | None:
    """ok iff sup-morphism that also preserves top and binary meets."""
    bad = check_sup_morphism(f)
    if bad:
        return bad
    dom, cod, t = f.dom, f.cod, f.table
    if not isinstance(dom, FiniteLocale) or not isinstance(cod, FiniteLocale):
        raise DomainMismatch("locale morphism endpoints must be locales")
    if t[dom.top] != cod.top:
        return Violation("top", (dom.top,))
    for x in dom.elements:
        for y in dom.elements:
            if t[dom.meet(x, y)] != cod.meet(t[x], t[y]):
                return Violation("meet", (x, y))
    return None


# -- free constructions ---------------------------------------------------


class PowerLocale(FiniteLocale):
    """The powerset frame P(X), with the singleton map x -> {x}."""

    __slots__ = ("base_set",)

    def singleton(self, x):
        if x not in self.base_set:
            raise DomainMismatch(f"{x!r} not in base set")
        return frozenset({x})


def power_locale(X, cap: int = DEFAULT_CAP) -> PowerLocale:
    base = _canon(X)
    if 2 ** len(base) > cap:
        raise SizeBound(f"2^{len(base)} exceeds cap {cap}")
    subsets = [frozenset()]
    for x in base:
        subsets += [s | {x} for s in subsets]
    elements = _canon(subsets)
    n = len(elements)
    ix = {e: i for i, e in enumerate(elements)}
    up = [0] * n
    for i, a in enumerate(elements):
        m = 0
        for j, b in enumerate(elements):
            if a <= b:
                m |= 1 << j
        up[i] = m
    jn = [[0] * n for _ in range(n)]
    mt = [[0] * n for _ in range(n)]
    for i, a in enumerate(elements):
        for j in range(i, n):
            b = elements[j]
            jn[i][j] = jn[j][i] = ix[a | b]
            mt[i][j] = mt[j][i] = ix[a & b]
    loc = PowerLocale(elements, up, jn, mt,
                      ix[frozenset()], ix[frozenset(base)])
    loc.base_set = frozenset(base)
    return loc


class FunctionLocale(FiniteLocale):
    """H^X with the pointwise locale structure and the H-valued singleton.

    Elements are tuples over the canonical order of X; the H-action is
    (a . theta)(x) = a ∧ theta(x) and {x}_H(y) = [x = y].
    """

    __slots__ = ("base", "domain", "_pos")

    def eval(self, theta, x):
        return theta[self._pos[x]]

    def singleton(self, x):
        if x not in self._pos:
            raise DomainMismatch(f"{x!r} not in domain")
        return tuple(
            self.base.top if x == y else self.base.bottom for y in self.domain
        )

    def act(self, a, theta):
        return tuple(self.base.meet(a, t) for t in theta)

    def from_map(self, f: dict):
        return tuple(f[x] for x in self.domain)


def function_lattice(H: FiniteLocale, X, cap: int = DEFAULT_CAP) -> FunctionLocale:
    base = _canon(X)
    size = len(H) ** len(base)
    if size > cap:
        raise SizeBound(f"|H|^|X| = {size} exceeds cap {cap}")
    import itertools

    elements = tuple(itertools.product(H.elements, repeat=len(base)))
    n = len(elements)
    ix = {e: i for i, e in enumerate(elements)}
    hup = H._up
    hix = H._ix
    up = [0] * n
    for i, e in enumerate(elements):
        m = 0
        for j, f in enumerate(elements):
            if all((hup[hix[a]] >> hix[b]) & 1 for a, b in zip(e, f)):
                m |= 1 << j
        up[i] = m
    jn = [[0] * n for _ in range(n)]
    mt = [[0] * n for _ in range(n)]
    for i, e in enumerate(elements):
        for j in range(i, n):
            f = elements[j]
            jn[i][j] = jn[j][i] = ix[tuple(H.join(a, b) for a, b in zip(e, f))]
            mt[i][j] = mt[j][i] = ix[tuple(H.meet(a, b) for a, b in zip(e, f))]
    bot = ix[tuple(H.bottom for _ in base)]
    top = ix[tuple(H.top for _ in base)]
    loc = FunctionLocale(elements, up, jn, mt, bot, top)
    loc.base = H
    loc.domain = base
    loc._pos = {x: k for k, x in enumerate(base)}
    return loc


def extend_to_free(fl: FunctionLocale, f: dict, module) -> SupMorphism:
    """The unique H-module morphism H^X -> M with f(theta) = V theta(x) . f(x).

    `module` provides the H-action on M via .lattice and .act(b, m).
    """
    M = module.lattice
    for x in fl.domain:
        if x not in f:
            raise DomainMismatch(f"assignment undefined on {x!r}")
    table = {}
    for theta in fl.elements:
        table[theta] = M.join_all(
            module.act(a, f[x]) for a, x in zip(theta, fl.domain)
        )
    g = SupMorphism(fl, M, table)
    bad = check_sup_morphism(g)
    if bad:
        raise NotAModule(f"extension is not a sup-morphism at {bad.witness!r}",
                         witness=bad.witness)
    for a in fl.base.elements:  # H-linearity of the extension
        for theta in fl.elements:
            if table[fl.act(a, theta)] != module.act(a, table[theta]):
                raise NotAModule(
                    f"extension is not H-linear at ({a!r}, {theta!r})",
                    witness=(a, theta),
                )
    for x in fl.domain:
        assert table[fl.singleton(x)] == f[x]
    return g


def presented_locale_morphism(H: FiniteLocale, Y, f: dict, module) -> SupMorphism:
    """Extend f: Y -> L to a verified H-locale morphism H^Y -> L.

    Requires i) the f(y) join to 1 and ii) distinct generators meet to 0;
    either failure is reported with the reason the extension breaks.
    """
    L = module.lattice
    ys = _canon(Y)
    total = L.join_all(f[y] for y in ys)
    if total != L.top:
        raise ConditionIFails(
            f"generator join is {total!r}, not top (extension cannot preserve 1)",
            witness=total,
        )
    for i, x in enumerate(ys):
        for y in ys[i + 1:]:
            if L.meet(f[x], f[y]) != L.bottom:
                raise ConditionIIFails(
                    f"f({x!r}) ∧ f({y!r}) exceeds their equality bracket "
                    "(extension cannot preserve ∧)",
                    witness=(x, y),
                )
    fl = function_lattice(H, ys, cap=max(DEFAULT_CAP, len(H) ** len(ys)))
    g = extend_to_free(fl, {y: f[y] for y in ys}, module)
    bad = check_locale_morphism(g)
    assert bad is None, f"presented extension not a locale morphism: {bad}"
    return g


def prime_elements(H: FiniteLocale) -> tuple:
    """u < top with x ∧ y <= u implying x <= u or y <= u."""
    out = []
    for u in H.elements:
        if u == H.top:
            continue
        if all(
            H.leq(x, u) or H.leq(y, u)
            for x in H.elements
            for y in H.elements
            if H.leq(H.meet(x, y), u)
        ):
            out.append(u)
    return tuple(out)


def points(H: FiniteLocale) -> tuple[SupMorphism, ...]:
    """All locale morphisms H -> Omega, one per prime element."""
    omega = two()
    out = []
    for u in prime_elements(H):
        table = {x: (0 if H.leq(x, u) else 1) for x in H.elements}
        p = SupMorphism(H, omega, table)
        assert check_locale_morphism(p) is None
        out.append(p)
    return tuple(out)


def locale_morphisms(L: FiniteLocale, A: FiniteLocale) -> tuple[SupMorphism, ...]:
    """All locale morphisms L -> A, enumerated through values on irreducibles."""
    import itertools

    irr = L.join_irreducibles()
    out = []
    for values in itertools.product(A.elements, repeat=len(irr)):
        v = dict(zip(irr, values))
        table = {x: A.join_all(v[j] for j in irr if L.leq(j, x))
                 for x in L.elements}
        f = SupMorphism(L, A, table)
        if check_locale_morphism(f) is None:
            out.append(f)
    seen, uniq = set(), []
    for f in out:
        key = tuple(sorted(f.table.items(), key=repr))
        if key not in seen:
            seen.add(key)
            uniq.append(f)
    return tuple(uniq)


def all_locales(max_size: int) -> tuple[FiniteLocale, ...]:
    """Every finite locale with at most max_size elements, up to isomorphism.

    Finite frames are the down-set lattices of finite posets, so posets are
    grown one point at a time (the new point's strict down-set is any down-set
    of the current poset) and pruned as soon as the down-set count overshoots.
    """
    found_keys = set()
    locales = []

    def downsets(up):
        n = len(up)
        out = []
        for mask in range(1 << n):
            ok = True
            for i in range(n):
                if (mask >> i) & 1:
                    for j in range(n):
                        if (up[j] >> i) & 1 and not (mask >> j) & 1:
                            ok = False
                            break
                if not ok:
                    break
            if ok:
                out.append(mask)
        return out

    def canon_key(up):
        # isomorphism-invariant certificate of the downset lattice
        n = len(up)
        dss = downsets(up)
        sizes = sorted(bin(m).count("1") for m in dss)
        incl = sorted(
            sorted(bin(a & b).count("1") for b in dss) for a in dss
        )
        return (n, tuple(sizes), tuple(tuple(r) for r in incl))

    def poset_iso(up1, up2):
        n = len(up1)
        if n != len(up2):
            return False
        import itertools as it

        for perm in it.permutations(range(n)):
            if all(
                ((up1[i] >> j) & 1) == ((up2[perm[i]] >> perm[j]) & 1)
                for i in range(n) for j in range(n)
            ):
                return True
        return False

    reps = {}  # canon_key -> list of poset up-mask tuples

    def emit(up):
        key = canon_key(up)
        for other in reps.get(key, ()):
            if poset_iso(list(up), list(other)):
                return
        reps.setdefault(key, []).append(up)
        dss = downsets(list(up))
        elements = tuple(
            frozenset(i for i in range(len(up)) if (m >> i) & 1) for m in dss
        )
        L = FiniteSupLattice.from_order(
            _canon(elements), lambda a, b: a <= b)
        locales.append(FiniteLocale.from_lattice(L))

    def grow(up):
        emit(tuple(up))
        n = len(up)
        for down_mask in downsets(up):
            new_up = [u | ((1 << n) if (down_mask >> i) & 1 else 0)
                      for i, u in enumerate(up)]
            new_up.append(1 << n)
            if len(downsets(new_up)) <= max_size:
                grow(new_up)

    grow([])
    uniq = []
    for L in locales:
        if not any(_lattice_iso(L, M) for M in uniq):
            uniq.append(L)
    return tuple(sorted(uniq, key=len))


def _lattice_iso(L: FiniteSupLattice, M: FiniteSupLattice) -> bool:
    import itertools

    if len(L) != len(M):
        return False
    lprof = sorted(sum(L.leq(x, y) for y in L.elements) for x in L.elements)
    mprof = sorted(sum(M.leq(x, y) for y in M.elements) for x in M.elements)
    if lprof != mprof:
        return False
    for perm in itertools.permutations(range(len(M))):
        if all(
            L.leq(L.elements[i], L.elements[j])
            == M.leq(M.elements[perm[i]], M.elements[perm[j]])
            for i in range(len(L)) for j in range(len(L))
        ):
            return True
    return False
