from __future__ import annotations

import random

from stabgraph.compiler import _conj_cx, _conj_cz
from stabgraph.core import TAG_H, TAG_I, TAG_S, PauliString, Tableau, pauli_conjugate_layer
from stabgraph.graphcode import GraphCode
from stabgraph.graphstate import ExtendedGraphState


def random_clifford_tableau(
    rng: random.Random, n: int, m: int, signs: bool = True
) -> Tableau:
    """m generators: images of Z_0..Z_{m-1} under a random Clifford."""
    rows = [PauliString(n, 0, 1 << i, 0) for i in range(m)]
    for _ in range(3 * n * n + 6):
        kind = rng.randrange(3)
        if kind == 0 and n >= 2:
            u, v = rng.sample(range(n), 2)
            rows = [_conj_cx(r, u, v) for r in rows]
        elif kind == 1 and n >= 2:
            u, v = rng.sample(range(n), 2)
            rows = [_conj_cz(r, u, v) for r in rows]
        else:
            u = rng.randrange(n)
            layer = [TAG_I] * n
            layer[u] = rng.choice((TAG_H, TAG_S))
            rows = [pauli_conjugate_layer(r, layer) for r in rows]
    if signs:
        rows = [r.mul_i_pow(2) if rng.random() < 0.5 else r for r in rows]
    return Tableau(n, tuple(rows))


def random_state(rng: random.Random, n: int, p_edge: float = 0.5) -> ExtendedGraphState:
    edges = [
        (u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p_edge
    ]
    local = {v: rng.randrange(24) for v in range(n)}
    return ExtendedGraphState(n, edges, local)


def random_graph_code(rng: random.Random, n: int, k: int, p_edge: float = 0.4) -> GraphCode:
    """A uniform-ish valid graph code: input rows drawn directly in RREF."""
    cols = sorted(rng.sample(range(n), k))
    colset = set(cols)
    rows = []
    for c in cols:
        row = {c}
        row.update(
            x for x in range(c + 1, n) if x not in colset and rng.random() < p_edge
        )
        rows.append(row)
    ins = sorted(rng.sample(range(n + k), k))
    outs = [v for v in range(n + k) if v not in ins]
    edges = []
    for w, row in zip(ins, rows):
        edges.extend((w, outs[c]) for c in row)
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p_edge:
                edges.append((outs[a], outs[b]))
    return GraphCode(n, ins, [outs[c] for c in cols], edges)


def all_graphs(n: int):
    """Every simple graph on n vertices as an edge list."""
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    for mask in range(1 << len(pairs)):
        yield [pairs[i] for i in range(len(pairs)) if (mask >> i) & 1]
