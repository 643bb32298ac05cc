"""Exhaustive lens category laws over every small polynomial.

Composites are computed once per composable pair with ``comp_lens`` and
indexed by their tables, so the associativity sweep over all triples is a
lookup.  Table identity stands in for ``eq_lens`` only after the two are
checked to agree on every parallel pair.
"""

from dataclasses import dataclass, field

from polyverse.poly import comp_lens, eq_lens, id_lens, iter_lenses

from oracles import SMALL


@dataclass
class CategoryReport:
    lenses: int = 0
    compositions: int = 0
    triples: int = 0
    parallel_pairs: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures


def _tables(f):
    return f.forward, f.backward


def check_category_laws(polys=SMALL):
    rep = CategoryReport()
    n = len(polys)
    homs = [[list(iter_lenses(p, q)) for q in polys] for p in polys]
    index = [[{_tables(f): i for i, f in enumerate(homs[a][b])} for b in range(n)] for a in range(n)]
    rep.lenses = sum(len(h) for row in homs for h in row)

    # eq_lens is an equivalence relation and coincides with table identity
    for a in range(n):
        for b in range(n):
            hom = homs[a][b]
            eq = [[bool(eq_lens(f, g)) for g in hom] for f in hom]
            rep.parallel_pairs += len(hom) ** 2
            for i in range(len(hom)):
                if not eq[i][i]:
                    rep.failures.append(("reflexive", a, b, i))
                for j in range(len(hom)):
                    if eq[i][j] != (i == j):
                        rep.failures.append(("eq_lens vs tables", a, b, i, j))
                    if eq[i][j] != eq[j][i]:
                        rep.failures.append(("symmetric", a, b, i, j))
            for i in range(len(hom)):
                for j in range(len(hom)):
                    if eq[i][j]:
                        for k in range(len(hom)):
                            if eq[j][k] and not eq[i][k]:
                                rep.failures.append(("transitive", a, b, i, j, k))

    # composition tables and unit laws
    comp = {}
    for a in range(n):
        ida = id_lens(polys[a])
        for b in range(n):
            idb = id_lens(polys[b])
            for f in homs[a][b]:
                if not eq_lens(comp_lens(ida, f), f) or not eq_lens(comp_lens(f, idb), f):
                    rep.failures.append(("unit", a, b, _tables(f)))
            for c in range(n):
                target = index[a][c]
                comp[a, b, c] = [
                    [target[_tables(comp_lens(f, g))] for g in homs[b][c]]
                    for f in homs[a][b]
                ]
                rep.compositions += len(homs[a][b]) * len(homs[b][c])

    for a in range(n):
        for b in range(n):
            for c in range(n):
                ab = comp[a, b, c]
                for d in range(n):
                    abd = comp[a, b, d]
                    bcd = comp[b, c, d]
                    acd = comp[a, c, d]
                    for i, row in enumerate(ab):
                        left_row = abd[i]
                        for j, ij in enumerate(row):
                            right_row = acd[ij]
                            jrow = bcd[j]
                            for k in range(len(jrow)):
                                if left_row[jrow[k]] != right_row[k]:
                                    rep.failures.append(("assoc", a, b, c, d, i, j, k))
                            rep.triples += len(jrow)
    return rep
