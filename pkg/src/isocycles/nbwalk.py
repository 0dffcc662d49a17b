"""Graph-side cycle counting through the non-backtracking edge operator.

Traces of operator powers count cyclically non-backtracking based closed
walks; Mobius inversion extracts primitive directed cycle counts.  All
counting is exact integer arithmetic; floating point appears only in the
spectral estimate and the random-walk bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from sympy import divisors, mobius

from .ssgraph import IsogenyGraph

_FLOAT_EXACT_LIMIT = 2**53


def _multiplicity_matrix(graph_or_matrix):
    if isinstance(graph_or_matrix, IsogenyGraph):
        if not graph_or_matrix.regular_flag:
            raise ValueError(
                "graph has p != 1 mod 12; the operator requires honest "
                "(ell+1)-regular undirected semantics"
            )
        return graph_or_matrix.multiplicity_matrix(), graph_or_matrix.ell
    mat = [list(map(int, row)) for row in graph_or_matrix]
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise ValueError("adjacency matrix must be square")
    if any(m < 0 for row in mat for m in row):
        raise ValueError("multiplicities must be nonnegative")
    for u in range(n):
        for v in range(u + 1, n):
            if mat[u][v] != mat[v][u]:
                raise ValueError(
                    f"directed imbalance between vertices {u} and {v}: "
                    f"{mat[u][v]} vs {mat[v][u]}"
                )
    degrees = {sum(row) for row in mat}
    if len(degrees) != 1:
        raise ValueError(f"graph is not regular: out-degrees {sorted(degrees)}")
    return mat, degrees.pop() - 1


class NonBacktrackingOperator:
    """0/1 operator on directed edges: continue without traversing the dual."""

    __slots__ = ("directed_edges", "dual", "matrix", "ell", "n_vertices")

    def __init__(self, directed_edges, dual, matrix, ell, n_vertices):
        self.directed_edges = directed_edges
        self.dual = dual
        self.matrix = matrix
        self.ell = ell
        self.n_vertices = n_vertices

    @property
    def dimension(self) -> int:
        return len(self.directed_edges)

    def successors(self, e: int) -> list[int]:
        return [f for f in range(self.dimension) if self.matrix[e, f]]


def build_nb_operator(graph_or_matrix) -> NonBacktrackingOperator:
    """Expand multiplicities into directed edges with a fixed dual pairing.

    Copies of a multiplicity-m undirected edge are dual-paired by copy
    index.  Loop copies pair up two at a time; an unpaired loop copy
    expands to two mutually dual directed half-edges.
    """
    mat, ell = _multiplicity_matrix(graph_or_matrix)
    n = len(mat)
    edges = []
    dual = []
    for u in range(n):
        for v in range(u + 1, n):
            for k in range(mat[u][v]):
                e = len(edges)
                edges.append((u, v, k))
                edges.append((v, u, k))
                dual.extend([e + 1, e])
        c = mat[u][u]
        for i in range(c // 2):
            e = len(edges)
            edges.append((u, u, 2 * i))
            edges.append((u, u, 2 * i + 1))
            dual.extend([e + 1, e])
        if c % 2:
            e = len(edges)
            edges.append((u, u, c - 1))
            edges.append((u, u, c - 1))
            dual.extend([e + 1, e])

    dim = len(edges)
    out_by_source = [[] for _ in range(n)]
    for idx, (s, _, _) in enumerate(edges):
        out_by_source[s].append(idx)
    b = np.zeros((dim, dim), dtype=np.int64)
    for e in range(dim):
        _, tgt, _ = edges[e]
        d = dual[e]
        for f in out_by_source[tgt]:
            if f != d:
                b[e, f] = 1
    return NonBacktrackingOperator(tuple(edges), tuple(dual), b, ell, n)


def closed_nbw_counts(op: NonBacktrackingOperator, r_max: int) -> list[int]:
    """Traces of operator powers 1..r_max, exact."""
    if r_max < 1:
        raise ValueError("r_max must be at least 1")
    b = op.matrix
    dim = b.shape[0]
    max_row = int(b.sum(axis=1).max()) if dim else 0
    float_safe = dim * (max(max_row, 1) ** r_max) < _FLOAT_EXACT_LIMIT
    if float_safe:
        b_work = b.astype(np.float64)
        power = b_work.copy()
        traces = [int(round(np.trace(power)))]
        for _ in range(r_max - 1):
            power = power @ b_work
            traces.append(int(round(np.trace(power))))
    else:
        b_work = np.array(b, dtype=object)
        power = b_work.copy()
        traces = [int(np.trace(power))]
        for _ in range(r_max - 1):
            power = power @ b_work
            traces.append(int(np.trace(power)))
    return traces


def directed_cycle_counts(traces: list[int], r_max: int | None = None) -> dict[int, int]:
    """Primitive directed cycle counts for r >= 3 by Mobius inversion.

    c_r = (1/r) sum over d | r of mu(r/d) t_d; divisibility is asserted,
    a non-exact division signals a graph or operator bug.
    """
    if r_max is None:
        r_max = len(traces)
    if r_max > len(traces):
        raise ValueError("traces shorter than requested r_max")
    out = {}
    for r in range(3, r_max + 1):
        total = sum(int(mobius(r // d)) * traces[d - 1] for d in divisors(r))
        q, rem = divmod(total, r)
        if rem:
            raise ArithmeticError(f"Mobius inversion not divisible at r={r}: {total}")
        out[r] = q
    return out


def undirected_cycle_counts(directed: dict[int, int], graph: IsogenyGraph) -> dict[int, int]:
    """Exact halving of directed counts; refused when the graph has loops."""
    loops = graph.total_loops()
    if loops:
        raise ValueError(
            f"graph has {loops} loops, so barbells may exist and directed "
            "counts need not halve exactly"
        )
    out = {}
    for r, c in directed.items():
        q, rem = divmod(c, 2)
        if rem:
            raise ArithmeticError(f"directed count c_{r}={c} is odd in a loop-free graph")
        out[r] = q
    return out


def barbell_upper_bound(graph: IsogenyGraph, r: int) -> int:
    """Bound on closed walks equal to their own reversal; even length only."""
    if r % 2 or r < 2:
        raise ValueError("barbells have an even number of edges")
    if graph.total_loops() < 2:
        return 0
    return graph.vertex_count * (graph.ell + 1) * graph.ell ** ((r - 2) // 2)


def rw_distribution_distance(graph: IsogenyGraph, subset, t: int):
    """Exact t-step random-walk deviation from uniform, and the spectral bound.

    Returns (max_j |Pr_t(j) - 1/n|, (1/#S) * (2*sqrt(ell)/(ell+1))^t).
    """
    if not graph.regular_flag:
        raise ValueError("random-walk bound requires p = 1 mod 12")
    subset = sorted(set(subset))
    if not subset:
        raise ValueError("initial subset must be nonempty")
    n = graph.vertex_count
    if any(i < 0 or i >= n for i in subset):
        raise ValueError("subset contains an invalid vertex index")
    ell = graph.ell
    adj = np.array(graph.multiplicity_matrix(), dtype=object)
    u = np.zeros(n, dtype=object)
    for i in subset:
        u[i] = 1
    for _ in range(t):
        u = adj @ u
    denominator = len(subset) * (ell + 1) ** t
    deviation = max(abs(Fraction(int(x), denominator) - Fraction(1, n)) for x in u)
    bound = (2 * math.sqrt(ell) / (ell + 1)) ** t / len(subset)
    return float(deviation), bound


def mixing_steps_bound(graph: IsogenyGraph, subset_size: int = 1) -> int:
    """Steps after which every vertex has positive probability mass."""
    ell = graph.ell
    rate = math.log((ell + 1) / (2 * math.sqrt(ell)))
    t = (math.log(graph.vertex_count) - math.log(subset_size)) / rate
    return math.floor(t) + 1


def spectral_check(graph: IsogenyGraph, tol: float = 1e-8, max_iter: int = 200000):
    """Largest eigenvalue exactly, second by power iteration, Ramanujan verdict."""
    if not graph.regular_flag:
        raise ValueError("spectral check requires p = 1 mod 12")
    ell = graph.ell
    adj = np.array(graph.multiplicity_matrix(), dtype=np.float64)
    n = graph.vertex_count
    ones = np.ones(n)
    if not np.array_equal(adj @ ones, (ell + 1) * ones):
        raise ArithmeticError("graph is not (ell+1)-regular")
    lam1 = float(ell + 1)
    x = np.cos(np.arange(n, dtype=np.float64))
    x -= x.mean()
    x /= np.linalg.norm(x)
    estimate = 0.0
    for _ in range(max_iter):
        y = adj @ x
        y -= y.mean()
        norm = float(np.linalg.norm(y))
        if norm == 0.0:
            estimate = 0.0
            break
        if abs(norm - estimate) < tol:
            estimate = norm
            break
        estimate = norm
        x = y / norm
    verdict = estimate <= 2 * math.sqrt(ell) + 1e-6
    return lam1, estimate, verdict


@dataclass(frozen=True)
class CycleCountTable:
    r_max: int
    traces: tuple
    directed: dict
    undirected: dict | None


def count_cycles(graph: IsogenyGraph, r_max: int) -> CycleCountTable:
    op = build_nb_operator(graph)
    traces = closed_nbw_counts(op, r_max)
    directed = directed_cycle_counts(traces, r_max)
    undirected = None
    if graph.total_loops() == 0:
        undirected = undirected_cycle_counts(directed, graph)
    return CycleCountTable(r_max, tuple(traces), directed, undirected)


def cycle_report(graph: IsogenyGraph, r_max: int) -> str:
    table = count_cycles(graph, r_max)
    rs = sorted(table.directed)
    payload = {
        "schema": 1,
        "p": graph.p,
        "ell": graph.ell,
        "r_max": r_max,
        "traces": list(table.traces),
        "directed": [table.directed[r] for r in rs],
        "undirected": [table.undirected[r] for r in rs] if table.undirected else None,
        "barbell_bounds": [
            [r, barbell_upper_bound(graph, r)] for r in range(2, r_max + 1, 2)
        ],
    }
    return json.dumps(payload, indent=2) + "\n"


def dfs_primitive_cycle_counts(op: NonBacktrackingOperator, r_max: int) -> dict[int, int]:
    """Independent oracle: enumerate primitive cyclically non-backtracking
    closed walks up to rotation by depth-first search over edge sequences.

    A rotation class is counted once, at its lexicographically least
    rotation.  Intended for small graphs and modest r_max.
    """
    succ = [op.successors(e) for e in range(op.dimension)]
    succ_sets = [frozenset(s) for s in succ]
    counts = {r: 0 for r in range(3, r_max + 1)}

    def dfs(start: int, path: list[int]):
        depth = len(path)
        if depth >= 3 and start in succ_sets[path[-1]]:
            seq = tuple(path)
            if _is_least_rotation(seq) and _is_primitive(seq):
                counts[depth] += 1
        if depth == r_max:
            return
        for f in succ[path[-1]]:
            if f >= start:
                path.append(f)
                dfs(start, path)
                path.pop()

    for start in range(op.dimension):
        dfs(start, [start])
    return counts


def _is_least_rotation(seq: tuple) -> bool:
    doubled = seq + seq
    n = len(seq)
    return all(seq <= doubled[k:k + n] for k in range(1, n))


def _is_primitive(seq: tuple) -> bool:
    n = len(seq)
    for period in divisors(n)[:-1]:
        if all(seq[i] == seq[i % period] for i in range(n)):
            return False
    return True
