"""Supersingular ell-isogeny graph construction over F_{p^2}.

One supersingular j-invariant is produced from congruence conditions on p
(or a CM seed when p = 1 mod 12), the graph is closed under roots of the
instantiated modular polynomial, and the vertex census is validated
against the closed-form count.
"""

from __future__ import annotations

import json
from functools import lru_cache

from sympy import isprime, nextprime

from . import hilbert
from .ff import PrimeField, QuadExtElement, kronecker_symbol, poly_roots
from .modpoly import ModularPolynomial, resolve_modular_polynomial

MAX_GRAPH_PRIME = 2 * 10**5
_SEED_SEARCH_LIMIT = 1000


def vertex_count_formula(p: int) -> int:
    """Number of supersingular j-invariants over F_{p^2}."""
    if p < 5:
        raise ValueError(f"formula requires p >= 5, got {p}")
    extra = {1: 0, 5: 1, 7: 1, 11: 2}[p % 12]
    return p // 12 + extra


def initial_supersingular_j(p: int) -> QuadExtElement:
    """One supersingular j-invariant in F_{p^2}.

    1728 when p = 3 mod 4, else 0 when p = 2 mod 3; for p = 1 mod 12 the
    canonically smallest root of a class polynomial H_{-q} mod p for the
    smallest prime q = 3 mod 4 that is inert over p.
    """
    if p < 5 or not isprime(p):
        raise ValueError(f"p must be a prime >= 5, got {p}")
    field = PrimeField(p)
    if p % 4 == 3:
        return field.elem(1728)
    if p % 3 == 2:
        return field.zero
    q = 3
    while True:
        if q % 4 == 3 and kronecker_symbol(-q, p) == -1:
            break
        q = int(nextprime(q))
        if q > _SEED_SEARCH_LIMIT:
            raise RuntimeError(f"no CM seed prime below {_SEED_SEARCH_LIMIT} for p={p}")
    roots = poly_roots(hilbert.hilbert_mod_p(-q, p, field))
    return roots[0]


class IsogenyGraph:
    """Vertices are supersingular j-invariants; directed multi-edges come
    from root multiplicities of the instantiated modular polynomial."""

    __slots__ = ("p", "ell", "field", "vertices", "vertex_index", "adjacency",
                 "regular_flag")

    def __init__(self, p, ell, field, vertices, adjacency):
        self.p = p
        self.ell = ell
        self.field = field
        self.vertices = vertices
        self.vertex_index = {v: i for i, v in enumerate(vertices)}
        self.adjacency = adjacency
        self.regular_flag = p % 12 == 1

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    def multiplicity(self, i: int, j: int) -> int:
        return self.adjacency[i].get(j, 0)

    def out_degree(self, i: int) -> int:
        return sum(self.adjacency[i].values())

    def loop_count_at(self, i: int) -> int:
        return self.adjacency[i].get(i, 0)

    def total_loops(self) -> int:
        return sum(self.adjacency[i].get(i, 0) for i in range(len(self.vertices)))

    def multiplicity_matrix(self) -> list[list[int]]:
        n = len(self.vertices)
        mat = [[0] * n for _ in range(n)]
        for i, row in enumerate(self.adjacency):
            for j, m in row.items():
                mat[i][j] = m
        return mat

    def label(self, i: int) -> str:
        v = self.vertices[i]
        return f"{v.a}+{v.b}*s"

    def to_json(self) -> str:
        payload = {
            "schema": 1,
            "p": self.p,
            "ell": self.ell,
            "non_residue": self.field.non_residue,
            "vertices": [self.label(i) for i in range(self.vertex_count)],
            "adjacency": [sorted(row.items()) for row in self.adjacency],
        }
        return json.dumps(payload, indent=2) + "\n"

    def to_dot(self) -> str:
        lines = [f'graph isogeny_{self.p}_{self.ell} {{']
        for i in range(self.vertex_count):
            lines.append(f'  v{i} [label="{self.label(i)}"];')
        for i, row in enumerate(self.adjacency):
            for j, m in sorted(row.items()):
                if j < i:
                    continue
                if j == i:
                    lines.append(f'  v{i} -- v{i} [label={m}];')
                else:
                    back = self.adjacency[j].get(i, 0)
                    tag = str(m) if back == m else f'"{m}/{back}"'
                    lines.append(f'  v{i} -- v{j} [label={tag}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_graph(p: int, ell: int, modpoly: ModularPolynomial | None = None,
                modpoly_dir: str | None = None) -> IsogenyGraph:
    """BFS closure of the supersingular locus under ell-isogeny adjacency.

    The vertex count is validated against the closed-form census; a
    mismatch signals an arithmetic bug or a non-supersingular seed.
    """
    if not isprime(ell):
        raise ValueError(f"ell must be prime, got {ell}")
    if p > MAX_GRAPH_PRIME:
        raise ValueError(f"p={p} exceeds the desk-scale cap {MAX_GRAPH_PRIME}")
    if ell >= p:
        raise ValueError(f"need ell < p, got ell={ell}, p={p}")
    if modpoly is None:
        modpoly = resolve_modular_polynomial(ell, modpoly_dir)
    if modpoly.level != ell:
        raise ValueError(f"modular polynomial level {modpoly.level} != ell {ell}")

    seed = initial_supersingular_j(p)
    field = seed.field
    expected = vertex_count_formula(p)

    neighbours: dict[QuadExtElement, list[QuadExtElement]] = {}
    frontier = [seed]
    seen = {seed}
    while frontier:
        nxt = []
        for v in frontier:
            roots = poly_roots(modpoly.instantiate(v, field))
            neighbours[v] = roots
            for w in roots:
                if w not in seen:
                    seen.add(w)
                    nxt.append(w)
        frontier = nxt
        if len(seen) > expected:
            break

    if len(seen) != expected:
        raise ArithmeticError(
            f"vertex census mismatch for p={p}, ell={ell}: closure found "
            f"{len(seen)} vertices, formula gives {expected}"
        )

    vertices = sorted(seen)
    index = {v: i for i, v in enumerate(vertices)}
    adjacency: list[dict[int, int]] = [dict() for _ in vertices]
    for v, roots in neighbours.items():
        row = adjacency[index[v]]
        for w in roots:
            row[index[w]] = row.get(index[w], 0) + 1

    graph = IsogenyGraph(p, ell, field, vertices, adjacency)
    _validate(graph)
    return graph


def _validate(graph: IsogenyGraph):
    d = graph.ell + 1
    for i in range(graph.vertex_count):
        if graph.out_degree(i) != d:
            raise ArithmeticError(
                f"vertex {graph.label(i)} has out-degree {graph.out_degree(i)} != {d}"
            )
    if graph.regular_flag:
        zero = graph.field.zero
        j1728 = graph.field.elem(1728)
        if zero in graph.vertex_index or j1728 in graph.vertex_index:
            raise ArithmeticError("0 or 1728 appeared in a p = 1 mod 12 graph")
        for i, row in enumerate(graph.adjacency):
            for j, m in row.items():
                if graph.adjacency[j].get(i, 0) != m:
                    raise ArithmeticError(
                        f"asymmetric multiplicities between {graph.label(i)} "
                        f"and {graph.label(j)}"
                    )


def loop_count(graph: IsogenyGraph, j) -> int:
    """Multiplicity of j as a root of the modular polynomial evaluated at j."""
    if isinstance(j, int):
        j = graph.field.elem(j)
    if j not in graph.vertex_index:
        raise ValueError(f"{j} is not a vertex of the graph")
    return graph.loop_count_at(graph.vertex_index[j])
