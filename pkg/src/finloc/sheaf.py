"""Finite sheaves on a finite locale P and their discrete modules.

A sheaf is stored as explicit section sets with restriction maps; gluing is
checked against every cover inside P.  The discrete module of a sheaf is the
lattice of its subsheaves, presented by one generator per section with
restriction and cover relations, so that the delta elements are generator
classes and the P-action is a table lookup.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .errors import (
    DomainMismatch,
    GluingFails,
    Mismatch,
    SizeBound,
    ValidationError,
)
from .lattice import FiniteLocale, FiniteSupLattice, _canon, is_frame, power_locale
from .modb import BModule, DualityData, check_duality
from .present import JoinPresentation, ModulePresentation, PresentedSupLattice
from .relation import AxiomReport

MAX_COVER_BASE = 14


class FiniteSheaf:
    """Sections X(p) for each p in P with functorial restriction maps."""

    def __init__(self, P: FiniteLocale, sections: dict, restrict: dict):
        self.P = P
        self.sections = {p: _canon(sections[p]) for p in P.elements}
        self.restrict = restrict

    def res(self, p, q, x):
        """Restrict x in X(p) to q <= p."""
        if p == q:
            return x
        return self.restrict[(p, q)][x]

    def total(self):
        return tuple((p, x) for p in self.P.elements for x in self.sections[p])

    def __repr__(self):
        return f"<FiniteSheaf over {len(self.P)}-locale, {len(self.total())} sections>"


def covers_of(P: FiniteLocale, p) -> list:
    """All subsets of the down-set of p whose join is p."""
    down = [q for q in P.down_set(p)]
    if len(down) > MAX_COVER_BASE:
        raise SizeBound(f"down-set of {p!r} too large for cover enumeration")
    out = []
    for r in range(len(down) + 1):
        for sub in itertools.combinations(down, r):
            if P.join_all(sub) == p:
                out.append(frozenset(sub))
    return out


def check_sheaf(P: FiniteLocale, sections: dict, restrict: dict) -> FiniteSheaf:
    """Validate functoriality and gluing; returns the sheaf or raises."""
    X = FiniteSheaf(P, sections, restrict)
    if len(X.sections[P.bottom]) != 1:
        raise ValidationError("sections over bottom must be a single point",
                              witness=P.bottom)
    for p in P.elements:
        for q in P.down_set(p):
            if q == p:
                continue
            if (p, q) not in restrict:
                raise DomainMismatch(f"missing restriction {p!r} -> {q!r}")
            for x in X.sections[p]:
                if X.res(p, q, x) not in X.sections[q]:
                    raise ValidationError(
                        f"restriction of {x!r} escapes X({q!r})", witness=(p, q, x))
    for p in P.elements:
        for q in P.down_set(p):
            for r in P.down_set(q):
                for x in X.sections[p]:
                    if X.res(q, r, X.res(p, q, x)) != X.res(p, r, x):
                        raise ValidationError(
                            "restrictions do not compose", witness=(p, q, r, x))
    for p in P.elements:
        for cover in covers_of(P, p):
            cov = sorted(cover, key=repr)
            fams = []
            for choice in itertools.product(*(X.sections[q] for q in cov)):
                fam = dict(zip(cov, choice))
                if all(
                    X.res(q1, P.meet(q1, q2), fam[q1])
                    == X.res(q2, P.meet(q1, q2), fam[q2])
                    for q1 in cov for q2 in cov
                ):
                    fams.append(tuple(fam[q] for q in cov))
            images = [tuple(X.res(p, q, x) for q in cov) for x in X.sections[p]]
            if len(set(images)) != len(images) or set(images) != set(fams):
                raise GluingFails(
                    f"X({p!r}) does not match compatible families over a cover",
                    witness=(p, frozenset(cover)),
                )
    return X


# -- discrete modules --------------------------------------------------------


@dataclass
class DiscreteModule:
    """The P-module of subsheaves of X, generated by its delta elements."""

    sheaf: FiniteSheaf
    quotient: PresentedSupLattice
    module: BModule
    delta: dict = field(repr=False)

    @property
    def lattice(self) -> FiniteSupLattice:
        return self.module.lattice

    def family_of(self, element) -> dict:
        """The natural family of an element: (p, x) -> largest q with x|q inside."""
        P = self.sheaf.P
        out = {}
        for p in P.elements:
            for x in self.sheaf.sections[p]:
                out[(p, x)] = P.join_all(
                    q for q in P.down_set(p)
                    if (q, self.sheaf.res(p, q, x)) in element
                )
        return out


def build_Xd(X: FiniteSheaf, carrier_cap: int = 4096) -> DiscreteModule:
    """Materialize the subsheaf lattice with its P-action and delta generators."""
    P = X.P
    gens = X.total()
    rels = []
    for p in P.elements:
        for x in X.sections[p]:
            for q in P.down_set(p):
                if q != p:
                    rels.append((frozenset({(p, x)}),
                                 frozenset({(p, x), (q, X.res(p, q, x))})))
            for cover in covers_of(P, p):
                if cover == frozenset({p}):
                    continue
                rels.append((frozenset({(p, x)}),
                             frozenset((q, X.res(p, q, x)) for q in cover)))
    q = PresentedSupLattice(JoinPresentation(tuple(gens), tuple(rels)),
                            carrier_cap)
    lat = q.lattice()
    delta = {(p, x): q.gen_class((p, x)).closure for (p, x) in gens}

    def action(b, C):
        return q.closure(
            (P.meet(p, b), X.res(p, P.meet(p, b), x)) for (p, x) in C
        )

    pres = ModulePresentation(lat, tuple(gens), delta, tuple(rels))
    module = BModule(P, lat, action, presentation=pres)
    d = DiscreteModule(X, q, module, delta)
    for (p, x) in gens:  # scaling a delta restricts its section
        for b in P.elements:
            assert module.act(b, delta[(p, x)]) \
                == delta[(P.meet(p, b), X.res(p, P.meet(p, b), x))]
    for C in lat.elements:  # every element is the join of its scaled deltas
        fam = d.family_of(C)
        rebuilt = lat.join_all(
            module.act(fam[(p, x)], delta[(p, x)]) for (p, x) in gens
        )
        assert rebuilt == C
    return d


def eq_bracket(d: DiscreteModule, px, qy):
    """The equality bracket of two sections: the largest open where they agree."""
    P = d.sheaf.P
    (p, x), (q, y) = px, qy
    m = P.meet(p, q)
    return P.join_all(
        r for r in P.down_set(m)
        if d.sheaf.res(p, r, x) == d.sheaf.res(q, r, y)
    )


def tilde_roundtrip(mod: BModule, check_frobenius: bool | None = None) -> None:
    """Validate the internal sheaf presentation of a P-module.

    Checks the fixed-point sections, the sum/restriction adjunction, the
    base-change identity, Frobenius reciprocity for frame carriers, and that
    the global sections recover the module.
    """
    P, M = mod.B, mod.lattice
    tilde = {p: tuple(x for x in M.elements if mod.act(p, x) == x)
             for p in P.elements}
    if set(tilde[P.top]) != set(M.elements):
        raise ValidationError("global sections do not recover the module",
                              witness=P.top)
    for p in P.elements:
        for q in P.down_set(p):
            for x in tilde[q]:
                if x not in tilde[p]:
                    raise ValidationError("sections not nested along the order",
                                          witness=(p, q, x))
                for y in tilde[p]:
                    below = M.leq(x, y)
                    adj = M.leq(x, mod.act(q, y))
                    if below != adj:
                        raise ValidationError("sum/restriction adjunction fails",
                                              witness=(p, q, x, y))
    for r in P.elements:
        for p in P.down_set(r):
            for p2 in P.down_set(r):
                for x in tilde[p]:
                    if mod.act(p2, x) != mod.act(P.meet(p, p2), x):
                        raise ValidationError("base-change identity fails",
                                              witness=(p, p2, x))
    if check_frobenius is None:
        check_frobenius = is_frame(M)[0]
    if check_frobenius:
        for p in P.elements:
            for q in P.down_set(p):
                for x in tilde[p]:
                    for y in tilde[q]:
                        if M.meet(mod.act(q, x), y) != M.meet(x, y):
                            raise ValidationError("Frobenius reciprocity fails",
                                                  witness=(p, q, x, y))


# -- internal relations and their module transposes ---------------------------


def _validate_internal_relation(lam: dict, dX: DiscreteModule, dY: DiscreteModule,
                                H: BModule) -> None:
    P = dX.sheaf.P
    M = H.lattice
    for p in P.elements:
        for x in dX.sheaf.sections[p]:
            for y in dY.sheaf.sections[p]:
                v = lam[(p, x, y)]
                if H.act(p, v) != v:
                    raise Mismatch(f"value at ({p!r}, {x!r}, {y!r}) not a "
                                   f"section over {p!r}")
                for q in P.down_set(p):
                    expected = H.act(q, v)
                    got = lam[(q, dX.sheaf.res(p, q, x), dY.sheaf.res(p, q, y))]
                    if got != expected:
                        raise Mismatch(
                            f"family not natural at ({p!r}, {q!r}, {x!r}, {y!r})")


def mu_from_lambda(lam: dict, dX: DiscreteModule, dY: DiscreteModule,
                   H: BModule) -> dict:
    """mu on delta pairs: restrict both sections to the common open and read lam."""
    _validate_internal_relation(lam, dX, dY, H)
    P = dX.sheaf.P
    mu = {}
    for (p, x) in dX.sheaf.total():
        for (q, y) in dY.sheaf.total():
            m = P.meet(p, q)
            mu[((p, x), (q, y))] = lam[
                (m, dX.sheaf.res(p, m, x), dY.sheaf.res(q, m, y))]
    return mu


def lambda_from_mu(mu: dict, dX: DiscreteModule, dY: DiscreteModule,
                   H: BModule) -> dict:
    """Recover the natural family by coscaling mu back to each level."""
    P = dX.sheaf.P
    lam = {}
    for p in P.elements:
        for x in dX.sheaf.sections[p]:
            for y in dY.sheaf.sections[p]:
                lam[(p, x, y)] = H.act(p, mu[((p, x), (p, y))])
    return lam


def scaling_identity_holds(mu: dict, lam: dict, dX: DiscreteModule,
                           dY: DiscreteModule, H: BModule) -> bool:
    """r . mu(dx (x) dy) equals the value of lam at the triple meet."""
    P = dX.sheaf.P
    for (p, x) in dX.sheaf.total():
        for (q, y) in dY.sheaf.total():
            for r in P.elements:
                m = P.meet(P.meet(p, q), r)
                lhs = H.act(r, mu[((p, x), (q, y))])
                rhs = H.act(m, lam[(m, dX.sheaf.res(p, m, x),
                                    dY.sheaf.res(q, m, y))])
                if lhs != rhs:
                    return False
    return True


def check_module_axioms(mu: dict, dX: DiscreteModule, dY: DiscreteModule,
                        H: BModule) -> AxiomReport:
    """The four axioms stated on delta generators at the module level."""
    P = dX.sheaf.P
    M = H.lattice
    wit = {}

    def himg(b):  # image of b under the structure map P -> H
        return H.act(b, M.top)

    ed = True
    for (p, x) in dX.sheaf.total():
        if M.join_all(mu[((p, x), gy)] for gy in dY.sheaf.total()) != himg(p):
            ed, wit["ed"] = False, (p, x)
            break
    uv = True
    for (p, x) in dX.sheaf.total():
        for gy1 in dY.sheaf.total():
            for gy2 in dY.sheaf.total():
                bound = himg(eq_bracket(dY, gy1, gy2))
                if not M.leq(M.meet(mu[((p, x), gy1)], mu[((p, x), gy2)]), bound):
                    uv, wit["uv"] = False, ((p, x), gy1, gy2)
                    break
            if not uv:
                break
        if not uv:
            break
    su = True
    for (q, y) in dY.sheaf.total():
        if M.join_all(mu[(gx, (q, y))] for gx in dX.sheaf.total()) != himg(q):
            su, wit["su"] = False, (q, y)
            break
    inj = True
    for (q, y) in dY.sheaf.total():
        for gx1 in dX.sheaf.total():
            for gx2 in dX.sheaf.total():
                bound = himg(eq_bracket(dX, gx1, gx2))
                if not M.leq(M.meet(mu[(gx1, (q, y))], mu[(gx2, (q, y))]), bound):
                    inj, wit["in"] = False, (gx1, gx2, (q, y))
                    break
            if not inj:
                break
        if not inj:
            break
    return AxiomReport(ed, uv, su, inj, wit)


def selfdual_Xd(d: DiscreteModule) -> DualityData:
    """X_d is self-dual: eta sums delta pairs, eps is the equality bracket."""
    P = d.sheaf.P
    gens = d.sheaf.total()

    eps_cache = {}

    def eps(theta, psi):
        key = (theta, psi)
        if key not in eps_cache:
            eps_cache[key] = P.join_all(
                eq_bracket(d, gx, gy) for gx in theta for gy in psi
            )
        return eps_cache[key]

    eta = tuple((d.delta[g], d.delta[g]) for g in gens)
    dd = DualityData(d.module, d.module, eps, eta)
    check_duality(dd)
    return dd


# -- constant sheaves and the external correspondence -------------------------


def _components(P: FiniteLocale, p) -> tuple:
    """Connected components of the join-irreducibles below p."""
    irr = [j for j in P.join_irreducibles() if P.leq(j, p)]
    comps = []
    for j in irr:
        linked = [c for c in comps
                  if any(P.leq(j, k) or P.leq(k, j)
                         or P.meet(j, k) != P.bottom for k in c)]
        merged = {j}
        for c in linked:
            merged |= c
            comps.remove(c)
        comps.append(merged)
    changed = True
    while changed:
        changed = False
        for a in comps:
            for b in comps:
                if a is not b and any(
                    P.meet(x, y) != P.bottom for x in a for y in b
                ):
                    comps.remove(b)
                    a |= b
                    changed = True
                    break
            if changed:
                break
    return tuple(frozenset(c) for c in
                 sorted(comps, key=lambda c: sorted(map(repr, c))))


def constant_sheaf(P: FiniteLocale, X) -> FiniteSheaf:
    """The sheaf of locally constant X-valued sections: one value per
    component of each open's irreducibles."""
    X = _canon(X)
    comps = {p: _components(P, p) for p in P.elements}
    sections = {p: tuple(itertools.product(X, repeat=len(comps[p])))
                for p in P.elements}
    restrict = {}
    for p in P.elements:
        for q in P.down_set(p):
            if q == p:
                continue
            pos = []
            for c in comps[q]:
                j = next(iter(c))
                parent = next(i for i, cp in enumerate(comps[p]) if j in cp)
                pos.append(parent)
            restrict[(p, q)] = {
                s: tuple(s[i] for i in pos) for s in sections[p]
            }
    return check_sheaf(P, sections, restrict)


def constant_section(P: FiniteLocale, sheaf: FiniteSheaf, x, p=None):
    """The image of x under the unit at level p (default: the top level)."""
    if p is None:
        p = P.top
    n = len(_components(P, p))
    return tuple(x for _ in range(n))


@dataclass(frozen=True)
class ExternalCorrespondence:
    stalk_relations: dict
    external_is_function: bool
    internal_is_function: bool

    @property
    def agree(self) -> bool:
        return self.external_is_function == self.internal_is_function


def external_correspondence(P: FiniteLocale, X, Y, lam_ext: dict
                            ) -> ExternalCorrespondence:
    """Compare a P-valued relation on plain sets with its internal avatar.

    The internal relation between the constant sheaves has, at each
    join-irreducible j, the stalk relation { (x, y) : j <= lam(x, y) };
    it is an internal function exactly when the external relation is a
    function-like relation in the plain sense.
    """
    from .relation import LRelation, check_axioms

    X, Y = _canon(X), _canon(Y)
    r = LRelation(P, X, Y, lam_ext)
    rep = check_axioms(r)
    stalks = {}
    internal_fn = True
    for j in P.join_irreducibles():
        rel = {(x, y) for x in X for y in Y if P.leq(j, lam_ext[(x, y)])}
        stalks[j] = rel
        total = all(any((x, y) in rel for y in Y) for x in X)
        single = all(
            len({y for y in Y if (x, y) in rel}) <= 1 for x in X
        )
        internal_fn = internal_fn and total and single
    if not P.join_irreducibles():
        internal_fn = True
    return ExternalCorrespondence(stalks, rep.is_function, internal_fn)


# -- helpers for tests and fixtures -------------------------------------------


def etale_sheaf(points, elements, anchor: dict) -> FiniteSheaf:
    """The sheaf of an anchored set over the powerset locale of its points.

    Sections over S are choice functions picking one element from each stalk,
    stored as sorted tuples of picked elements.
    """
    P = power_locale(points)
    stalk = {o: _canon([e for e in elements if anchor[e] == o]) for o in points}
    sections = {}
    for S in P.elements:
        ss = sorted(S, key=repr)
        sections[S] = tuple(
            tuple(choice) for choice in itertools.product(*(stalk[o] for o in ss))
        )
    restrict = {}
    for S in P.elements:
        ss = sorted(S, key=repr)
        for Q in P.down_set(S):
            if Q == S:
                continue
            keep = [i for i, o in enumerate(ss) if o in Q]
            restrict[(S, Q)] = {
                s: tuple(s[i] for i in keep) for s in sections[S]
            }
    return check_sheaf(P, sections, restrict)


def enumerate_sheaves(P: FiniteLocale, max_total: int):
    """All sheaves over P with at most max_total non-bottom sections.

    Built from stalk data at join-irreducibles: section sets at each j with
    restriction maps along the irreducible order, then completed by
    compatible families at every other level.
    """
    irr = P.join_irreducibles()
    if not irr:
        base = {P.bottom: ("pt",)}
        yield check_sheaf(P, base, {})
        return
    for sizes in itertools.product(range(max_total + 1), repeat=len(irr)):
        stalks = {j: tuple(f"{k}@{ji}" for k in range(n))
                  for (ji, j), n in zip(enumerate(irr), sizes)}
        pairs = [(j, k) for j in irr for k in irr
                 if j != k and P.leq(k, j)]
        maps_options = []
        for (j, k) in pairs:
            if len(stalks[k]) == 0 and len(stalks[j]) > 0:
                maps_options = None
                break
            maps_options.append([
                dict(zip(stalks[j], pick))
                for pick in itertools.product(stalks[k], repeat=len(stalks[j]))
            ])
        if maps_options is None:
            continue
        for assignment in itertools.product(*maps_options):
            rmaps = dict(zip(pairs, assignment))
            ok = True
            for (j, k) in pairs:  # composition across irreducible chains
                for (k2, l) in pairs:
                    if k2 == k and (j, l) in rmaps:
                        for x in stalks[j]:
                            if rmaps[(k, l)][rmaps[(j, k)][x]] != rmaps[(j, l)][x]:
                                ok = False
            if not ok:
                continue
            sheaf = _sheaf_from_stalks(P, irr, stalks, rmaps)
            if sheaf is not None:
                yield sheaf


def _sheaf_from_stalks(P, irr, stalks, rmaps):
    sections = {}
    for p in P.elements:
        js = [j for j in irr if P.leq(j, p)]
        fams = []
        for choice in itertools.product(*(stalks[j] for j in js)):
            fam = dict(zip(js, choice))
            if all(
                rmaps[(j, k)][fam[j]] == fam[k]
                for j in js for k in js if j != k and P.leq(k, j)
            ):
                fams.append(tuple(fam[j] for j in js))
        sections[p] = tuple(fams)
    restrict = {}
    for p in P.elements:
        js = [j for j in irr if P.leq(j, p)]
        for q in P.down_set(p):
            if q == p:
                continue
            ks = [j for j in irr if P.leq(j, q)]
            table = {}
            for s in sections[p]:
                fam = dict(zip(js, s))
                table[s] = tuple(fam[k] for k in ks)
            restrict[(p, q)] = table
    try:
        return check_sheaf(P, sections, restrict)
    except (GluingFails, ValidationError):
        return None
