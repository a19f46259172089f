"""Graph codes: stabilizer codes presented as graphs with marked vertices.

A graph code is a simple graph whose vertices split into k inputs, k
pivots matched one-to-one with the inputs, and further plain outputs.
The pivots double as outputs: together they carry the n physical qubits,
numbered by vertex order. Everything about the code is read off the
picture: each non-pivot output contributes one stabilizer generator and
each input one logical qubit, with representatives given by neighborhoods.

Not every placement of pivots is consistent. Row-reducing the
input/output adjacency matrix must reproduce the chosen pivots as the
pivot columns; `validate` checks exactly this, and the extraction
routines demand it. Construction itself only checks well-formedness, so
infeasible placements can be built and then rejected.

CSS codes admit a second presentation (`KlForm`) with two-colored output
nodes and plain edges. `kl_from_tableau` computes it from any tableau
that admits a sign-free CSS generating set, `kl_extract` reads the
checks and logical operators back off the picture, and `count_kl` counts
the forms. `reduced_form` shrinks a decorated diagram for display by
fusing through trivial nodes, keeping the encoded codespace intact.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

from .core import (
    TAG_H,
    TAG_HZ,
    TAG_I,
    TAG_S,
    TAG_SZ,
    TAG_Z,
    PauliString,
    Tableau,
    gf2_kernel,
    gf2_nullspace,
    gf2_rank,
    gf2_rref,
    tableau_valid,
)

__all__ = [
    "GraphCode",
    "KlForm",
    "ReducedDiagram",
    "validate",
    "canonical_stabilizers",
    "logical_operators",
    "degree_bounds",
    "is_css",
    "kl_from_tableau",
    "kl_extract",
    "count_kl",
    "prime_decompose",
    "reduced_form",
]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _build_adj(nv: int, edges) -> list[int]:
    adj = [0] * nv
    for u, v in edges:
        if u == v:
            raise ValueError(f"self loop on vertex {u}")
        if not (0 <= u < nv and 0 <= v < nv):
            raise ValueError("edge endpoint out of range")
        adj[u] |= 1 << v
        adj[v] |= 1 << u
    return adj


def _check_roles(n: int, ins: tuple, piv: tuple) -> None:
    if len(ins) != len(piv):
        raise ValueError("need exactly one pivot per input")
    k = len(ins)
    if n < 0 or k > n:
        raise ValueError("need 0 <= k <= n")
    if any(not 0 <= v < n + k for v in ins + piv):
        raise ValueError("vertex out of range")
    if len(set(ins)) != k or len(set(piv)) != k or set(ins) & set(piv):
        raise ValueError("inputs and pivots must be distinct vertices")


class GraphCode:
    """A graph with k matched input/pivot pairs presenting an [[n, k]] code.

    Vertices are the integers 0..n+k-1. The non-input vertices are the
    outputs, numbered 0..n-1 in vertex order, and `inputs[i]` is matched
    to `pivots[i]` with pairs stored sorted by input vertex. Instances
    are immutable and hashable; `validate` decides pivot feasibility.
    """

    __slots__ = ("n", "k", "inputs", "pivots", "adj", "outputs", "_onum", "_imask")

    def __init__(self, n: int, inputs=(), pivots=(), edges=()):
        ins = tuple(inputs)
        piv = tuple(pivots)
        _check_roles(n, ins, piv)
        k = len(ins)
        nv = n + k
        pairs = sorted(zip(ins, piv))
        adj = _build_adj(nv, edges)
        imask = 0
        for w in ins:
            imask |= 1 << w
        outputs = tuple(v for v in range(nv) if not imask >> v & 1)
        onum = [-1] * nv
        for i, v in enumerate(outputs):
            onum[v] = i
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "inputs", tuple(w for w, _ in pairs))
        object.__setattr__(self, "pivots", tuple(u for _, u in pairs))
        object.__setattr__(self, "adj", tuple(adj))
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "_onum", tuple(onum))
        object.__setattr__(self, "_imask", imask)

    def __setattr__(self, name, value):
        raise AttributeError("GraphCode is immutable")

    def neighbors(self, v: int) -> int:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def is_input(self, v: int) -> bool:
        return bool(self._imask >> v & 1)

    def output_number(self, v: int) -> int:
        num = self._onum[v]
        if num < 0:
            raise ValueError(f"vertex {v} is an input")
        return num

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u in range(self.n + self.k):
            for v in _bits(self.adj[u] & -(2 << u)):
                out.append((u, v))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GraphCode):
            return NotImplemented
        return (self.n, self.inputs, self.pivots, self.adj) == (
            other.n,
            other.inputs,
            other.pivots,
            other.adj,
        )

    def __hash__(self) -> int:
        return hash((self.n, self.inputs, self.pivots, self.adj))

    def __repr__(self) -> str:
        return f"GraphCode(n={self.n}, k={self.k}, edges={len(self.edges())})"

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "inputs": list(self.inputs),
            "pivots": list(self.pivots),
            "edges": [list(e) for e in self.edges()],
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> GraphCode:
        g = GraphCode(
            data["n"],
            data.get("inputs", ()),
            data.get("pivots", ()),
            [tuple(e) for e in data.get("edges", ())],
        )
        if "k" in data and data["k"] != g.k:
            raise ValueError("k does not match the number of inputs")
        return g

    def to_dot(self, name: str = "code") -> str:
        piv = set(self.pivots)
        lines = [f"graph {name} {{", "  node [shape=circle];"]
        for v in range(self.n + self.k):
            if self.is_input(v):
                colour = "blue"
            elif v in piv:
                colour = "orange"
            else:
                colour = "black"
            lines.append(f'  {v} [color="{colour}"];')
        for u, v in self.edges():
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines)


def _partial_matrix(g) -> list[int]:
    """Input rows over output columns of the input/output adjacency."""
    rows = []
    for w in g.inputs:
        row = 0
        for v in _bits(g.adj[w] & ~g._imask):
            row |= 1 << g._onum[v]
        rows.append(row)
    return rows


def validate(g: GraphCode) -> bool:
    """True when the chosen pivots are a feasible reading of the graph.

    Three conditions: no input-input edges; every pivot touches exactly
    its matched input among the inputs; and row-reducing the input/output
    adjacency puts the pivots at the pivot columns.
    """
    imask = g._imask
    if any(g.adj[w] & imask for w in g.inputs):
        return False
    for w, u in zip(g.inputs, g.pivots):
        if g.adj[u] & imask != 1 << w:
            return False
    _, pivcols = gf2_rref(_partial_matrix(g), g.n)
    return sorted(pivcols) == sorted(g._onum[u] for u in g.pivots)


def _require_valid(g: GraphCode) -> None:
    if not validate(g):
        raise ValueError("graph code has an infeasible pivot assignment")


def _x_on(g, v: int) -> PauliString:
    return PauliString(g.n, 1 << g._onum[v], 0, 0)


def _z_on(g, mask: int) -> PauliString:
    z = 0
    for v in _bits(mask):
        z |= 1 << g._onum[v]
    return PauliString(g.n, 0, z, 0)


def canonical_stabilizers(g: GraphCode) -> Tableau:
    """Read the n-k stabilizer generators off a valid graph code.

    Each non-pivot output v yields X_v Z_N(v), further multiplied by
    X_p Z_N(p) for the matched pivot p of every input neighbor of v, in
    written order (N taken among outputs only). Overlapping X/Z supports
    produce Y's. Each factor is a vertex stabilizer of the underlying
    graph state with its Z's on inputs dropped; those cancel in pairs
    across the product, so the phase worked out here is exactly the sign
    carried by the encoded state's stabilizer, and it can be negative.
    """
    _require_valid(g)
    pivot_of = dict(zip(g.inputs, g.pivots))
    piv = set(g.pivots)
    rows = []
    for v in g.outputs:
        if v in piv:
            continue
        s = _x_on(g, v) * _z_on(g, g.adj[v] & ~g._imask)
        for w in _bits(g.adj[v] & g._imask):
            u = pivot_of[w]
            s = s * _x_on(g, u) * _z_on(g, g.adj[u] & ~g._imask)
        assert s.is_hermitian
        rows.append(s)
    return Tableau(g.n, tuple(rows))


def logical_operators(g: GraphCode) -> list[tuple[PauliString, PauliString]]:
    """One (logical X, logical Z) pair per input, in input order.

    The logical X of an input is Z on its output neighborhood; the
    logical Z is X on its pivot times Z on the pivot's output
    neighborhood.
    """
    _require_valid(g)
    pairs = []
    for w, u in zip(g.inputs, g.pivots):
        xbar = _z_on(g, g.adj[w] & ~g._imask)
        zbar = _x_on(g, u) * _z_on(g, g.adj[u] & ~g._imask)
        pairs.append((xbar, zbar))
    return pairs


def degree_bounds(g: GraphCode) -> tuple[int | None, int]:
    """Upper bounds (code distance, max stabilizer weight) from degrees.

    The distance bound is the minimum over input degrees and, sharpened,
    over |N(u)|+1 for outputs u neighboring an input (N among outputs);
    it is None for k = 0. The weight bound is
    1 + max_O deg + (max_O #input-neighbors) * (max_P #output-neighbors)
    over non-pivot outputs O and pivots P.
    """
    _require_valid(g)
    imask = g._imask
    dist = None
    if g.k:
        dist = min(g.degree(w) for w in g.inputs)
        seen = 0
        for w in g.inputs:
            seen |= g.adj[w]
        for u in _bits(seen & ~imask):
            dist = min(dist, (g.adj[u] & ~imask).bit_count() + 1)
    piv = set(g.pivots)
    d_out = d_oi = d_po = 0
    for v in g.outputs:
        if v in piv:
            d_po = max(d_po, (g.adj[v] & ~imask).bit_count())
        else:
            d_out = max(d_out, g.degree(v))
            d_oi = max(d_oi, (g.adj[v] & imask).bit_count())
    return dist, 1 + d_out + d_oi * d_po


def is_css(g: GraphCode):
    """Two-color the graph, or return None when an odd cycle exists.

    Returns a (side0, side1) vertex partition with the lowest vertex of
    every component on side0. Applying Hadamards on one side turns the
    code into CSS form.
    """
    nv = g.n + g.k
    colour = [-1] * nv
    for start in range(nv):
        if colour[start] >= 0:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            v = stack.pop()
            for u in _bits(g.adj[v]):
                if colour[u] < 0:
                    colour[u] = colour[v] ^ 1
                    stack.append(u)
                elif colour[u] == colour[v]:
                    return None
    side0 = tuple(v for v in range(nv) if colour[v] == 0)
    side1 = tuple(v for v in range(nv) if colour[v] == 1)
    return side0, side1


class KlForm:
    """Two-colored CSS presentation: input X nodes and Z/X output nodes.

    The vertex layout matches GraphCode (outputs numbered 0..n-1 in
    vertex order); `colors[i]` gives the side of output i. Input/pivot
    pairs are stored sorted by pivot position. Construction enforces the
    whole rule set: plain edges only between Z outputs and the other
    side, X outputs reaching only higher-numbered Z outputs, and the
    input adjacency row-reduced onto the matched pivots.
    """

    __slots__ = ("n", "k", "inputs", "pivots", "adj", "outputs", "colors", "_onum", "_imask")

    def __init__(self, n: int, inputs=(), pivots=(), edges=(), colors=()):
        ins = tuple(inputs)
        piv = tuple(pivots)
        _check_roles(n, ins, piv)
        k = len(ins)
        nv = n + k
        adj = _build_adj(nv, edges)
        imask = 0
        for w in ins:
            imask |= 1 << w
        outputs = tuple(v for v in range(nv) if not imask >> v & 1)
        onum = [-1] * nv
        for i, v in enumerate(outputs):
            onum[v] = i
        if isinstance(colors, Mapping):
            missing = [v for v in outputs if v not in colors]
            if missing:
                raise ValueError(f"missing color for output vertex {missing[0]}")
            cols = tuple(colors[v] for v in outputs)
        else:
            cols = tuple(colors)
        if len(cols) != n or any(c not in ("Z", "X") for c in cols):
            raise ValueError("need one Z or X color per output")
        zmask = 0
        for i, v in enumerate(outputs):
            if cols[i] == "Z":
                zmask |= 1 << v
        pairs = sorted(zip(ins, piv), key=lambda p: onum[p[1]])
        for _, u in pairs:
            if not zmask >> u & 1:
                raise ValueError("pivots must be Z outputs")
        for v in range(nv):
            side = zmask >> v & 1
            if any(zmask >> u & 1 == side for u in _bits(adj[v])):
                raise ValueError("edges must join a Z output to the other side")
        for i, v in enumerate(outputs):
            if cols[i] == "X" and any(onum[u] < i for u in _bits(adj[v])):
                raise ValueError("X output adjacent to a lower-numbered Z output")
        # The self-marked X adjacency being row-reduced follows from the
        # ordering rule plus bipartiteness, so only the input side needs
        # an explicit matrix check.
        zcols = [i for i, c in enumerate(cols) if c == "Z"]
        zpos = {num: j for j, num in enumerate(zcols)}
        rows = []
        want = []
        for w, u in pairs:
            row = 0
            for x in _bits(adj[w]):
                row |= 1 << zpos[onum[x]]
            rows.append(row)
            want.append(zpos[onum[u]])
        red, pivcols = gf2_rref(rows, len(zcols))
        if red != rows or pivcols != want:
            raise ValueError("input adjacency is not row-reduced onto the pivots")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "inputs", tuple(w for w, _ in pairs))
        object.__setattr__(self, "pivots", tuple(u for _, u in pairs))
        object.__setattr__(self, "adj", tuple(adj))
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "colors", cols)
        object.__setattr__(self, "_onum", tuple(onum))
        object.__setattr__(self, "_imask", imask)

    def __setattr__(self, name, value):
        raise AttributeError("KlForm is immutable")

    def neighbors(self, v: int) -> int:
        return self.adj[v]

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def is_input(self, v: int) -> bool:
        return bool(self._imask >> v & 1)

    def output_number(self, v: int) -> int:
        num = self._onum[v]
        if num < 0:
            raise ValueError(f"vertex {v} is an input")
        return num

    def color(self, v: int) -> str:
        return "X" if self.is_input(v) else self.colors[self._onum[v]]

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for u in range(self.n + self.k):
            for v in _bits(self.adj[u] & -(2 << u)):
                out.append((u, v))
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, KlForm):
            return NotImplemented
        return (self.n, self.inputs, self.pivots, self.adj, self.colors) == (
            other.n,
            other.inputs,
            other.pivots,
            other.adj,
            other.colors,
        )

    def __hash__(self) -> int:
        return hash((self.n, self.inputs, self.pivots, self.adj, self.colors))

    def __repr__(self) -> str:
        p = self.colors.count("X")
        return f"KlForm(n={self.n}, k={self.k}, p={p}, q={self.n - p - self.k})"

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "inputs": list(self.inputs),
            "pivots": list(self.pivots),
            "edges": [list(e) for e in self.edges()],
            "colors": {str(v): self.colors[i] for i, v in enumerate(self.outputs)},
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> KlForm:
        colors = {int(v): c for v, c in data.get("colors", {}).items()}
        kl = KlForm(
            data["n"],
            data.get("inputs", ()),
            data.get("pivots", ()),
            [tuple(e) for e in data.get("edges", ())],
            colors,
        )
        if "k" in data and data["k"] != kl.k:
            raise ValueError("k does not match the number of inputs")
        return kl

    def to_dot(self, name: str = "klform") -> str:
        lines = [f"graph {name} {{", "  node [shape=circle];"]
        piv = set(self.pivots)
        for v in range(self.n + self.k):
            if self.is_input(v):
                colour = "blue"
            elif v in piv:
                colour = "orange"
            else:
                colour = "black"
            lines.append(f'  {v} [color="{colour}", label="{self.color(v)}{v}"];')
        for u, v in self.edges():
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines)


def kl_extract(kl: KlForm):
    """Read (Z checks, X checks, logical Zs, logical Xs) off a KlForm.

    Every X output yields the Z check on itself and its neighborhood;
    every non-pivot Z output yields an X check built from its X-output
    neighbors and, through its input neighbors, their pivots' X-output
    neighborhoods (mod 2). Inputs yield logical Z on their neighborhood
    and logical X on their pivot's self-marked X neighborhood.
    """
    n = kl.n
    xvmask = 0
    for i, v in enumerate(kl.outputs):
        if kl.colors[i] == "X":
            xvmask |= 1 << v

    def xnbrs(v: int) -> int:
        m = 0
        for u in _bits(kl.adj[v] & xvmask):
            m |= 1 << kl._onum[u]
        return m

    z_checks = []
    for v in _bits(xvmask):
        mask = 1 << kl._onum[v]
        for u in _bits(kl.adj[v]):
            mask |= 1 << kl._onum[u]
        z_checks.append(PauliString(n, 0, mask, 0))
    pivot_of = dict(zip(kl.inputs, kl.pivots))
    piv = set(kl.pivots)
    x_checks = []
    for i, v in enumerate(kl.outputs):
        if kl.colors[i] != "Z" or v in piv:
            continue
        bits = 1 << i ^ xnbrs(v)
        for w in _bits(kl.adj[v] & kl._imask):
            u = pivot_of[w]
            bits ^= 1 << kl._onum[u] ^ xnbrs(u)
        x_checks.append(PauliString(n, bits, 0, 0))
    logical_z = []
    logical_x = []
    for w, u in zip(kl.inputs, kl.pivots):
        zb = 0
        for x in _bits(kl.adj[w]):
            zb |= 1 << kl._onum[x]
        logical_z.append(PauliString(n, 0, zb, 0))
        logical_x.append(PauliString(n, 1 << kl._onum[u] | xnbrs(u), 0, 0))
    return z_checks, x_checks, logical_z, logical_x


def kl_from_tableau(t: Tableau) -> KlForm:
    """Build the two-colored CSS form from a CSS-compatible tableau.

    The Z-only and X-only subgroups are recovered by GF(2) recombination,
    so the given rows need not themselves be Z- or X-pure. Raises when
    the two subgroups do not jointly generate the stabilizer group, or
    when a recombined generator carries a - sign. The result depends
    only on the stabilizer group, not on the generating set.
    """
    if not tableau_valid(t):
        raise ValueError("not a valid stabilizer tableau")
    n = t.n
    rows = t.rows
    zcombos = gf2_kernel([r.x for r in rows], n)
    xcombos = gf2_kernel([r.z for r in rows], n)
    if len(zcombos) + len(xcombos) != len(rows):
        raise ValueError("tableau has no CSS generating set")

    def combine(combos):
        gens = []
        for c in combos:
            s = PauliString.identity(n)
            for i in _bits(c):
                s = s * rows[i]
            if s.sign:
                raise ValueError("CSS recombination produced a - sign")
            gens.append(s)
        return gens

    zgens = combine(zcombos)
    xgens = combine(xcombos)
    red_z, piv_z = gf2_rref([s.z for s in zgens], n)
    edges = []
    for row, pv in zip(red_z, piv_z):
        for c in _bits(row ^ 1 << pv):
            edges.append((pv, c))
    sols = gf2_nullspace([s.x for s in xgens], n)
    reduced = []
    for vec in sols:
        for row, pv in zip(red_z, piv_z):
            if vec >> pv & 1:
                vec ^= row
        reduced.append(vec)
    red_l, piv_l = gf2_rref(reduced, n)
    k = n - len(zgens) - len(xgens)
    assert len(piv_l) == k
    for i, row in enumerate(red_l[:k]):
        for c in _bits(row):
            edges.append((n + i, c))
    colors = ["Z"] * n
    for pv in piv_z:
        colors[pv] = "X"
    return KlForm(n, tuple(range(n, n + k)), tuple(piv_l), edges, colors)


def count_kl(n: int, p: int, q: int) -> int:
    """Number of two-colored CSS forms with p X outputs and q X checks."""
    if min(n, p, q) < 0 or p + q > n:
        raise ValueError("need p >= 0, q >= 0, p + q <= n")
    total = 1
    for r, dim in ((p, n), (q, n - p)):
        num = den = 1
        for i in range(r):
            num *= 2**dim - 2**i
            den *= 2**r - 2**i
        assert num % den == 0
        total *= num // den
    return total


def prime_decompose(g: GraphCode) -> list[GraphCode]:
    """Split a graph code into its connected components.

    Requires the input/output adjacency to have full rank, so every
    component carries a well-defined sub-code. Components are returned
    ordered by their lowest original vertex, with vertices renumbered
    but kept in relative order.
    """
    if gf2_rank(_partial_matrix(g), g.n) != g.k:
        raise ValueError("input/output adjacency is rank deficient")
    nv = g.n + g.k
    comp = [-1] * nv
    ncomp = 0
    for start in range(nv):
        if comp[start] >= 0:
            continue
        comp[start] = ncomp
        stack = [start]
        while stack:
            v = stack.pop()
            for u in _bits(g.adj[v]):
                if comp[u] < 0:
                    comp[u] = ncomp
                    stack.append(u)
        ncomp += 1
    pivot_of = dict(zip(g.inputs, g.pivots))
    for w, u in pivot_of.items():
        if comp[w] != comp[u]:
            raise ValueError("matched pivot separated from its input")
    parts = []
    for c in range(ncomp):
        verts = [v for v in range(nv) if comp[v] == c]
        new = {v: i for i, v in enumerate(verts)}
        ins = [w for w in g.inputs if comp[w] == c]
        edges = [(new[u], new[v]) for u, v in g.edges() if comp[u] == c]
        parts.append(
            GraphCode(
                len(verts) - len(ins),
                [new[w] for w in ins],
                [new[pivot_of[w]] for w in ins],
                edges,
            )
        )
    return parts


@dataclass(frozen=True)
class ReducedDiagram:
    """A fused spider diagram left after eliminating trivial nodes.

    `nodes` keeps original vertex ids and `phases` the quarter turns per
    node, aligned. `internal` holds (u, v, hadamard) edges with u < v;
    `free` holds (node, kind, wire, hadamard) legs where kind is "out"
    or "in" and wire numbers the physical or logical qubit carried.
    """

    n: int
    k: int
    nodes: tuple[int, ...]
    phases: tuple[int, ...]
    internal: tuple[tuple[int, int, bool], ...]
    free: tuple[tuple[int, str, int, bool], ...]


_TAG_PHASE = {TAG_I: 0, TAG_S: 1, TAG_Z: 2, TAG_SZ: 3, TAG_H: 0, TAG_HZ: 2}


def reduced_form(zxcf, normalize_output_basis: bool = False) -> ReducedDiagram:
    """Fuse trivial nodes out of a decorated graph code for display.

    Accepts anything with `graph` and `tags` attributes (a bare
    GraphCode works too, with empty tags). Phase-zero nodes carrying one
    internal edge and one wire hand their wire to the neighbor, with
    Hadamards composing along the way; wires handed over by inputs drop
    any Hadamard since basis changes on the input side are free. Both
    moves keep the encoded codespace exactly.

    With `normalize_output_basis`, a phase-free node holding several
    output wires and at most one other attachment additionally has its
    wire Hadamards toggled when the lowest wire carries one; this trades
    the codespace for an explicit Hadamard layer on the toggled wires
    and exists only to match hand-drawn pictures.
    """
    g = getattr(zxcf, "graph", zxcf)
    tags = dict(getattr(zxcf, "tags", None) or {})
    nv = g.n + g.k
    alive = set(range(nv))
    phase = [0] * nv
    internal = [(min(u, v), max(u, v), True) for u, v in g.edges()]
    free = []
    for v in g.outputs:
        t = tags.get(v, TAG_I)
        if t not in _TAG_PHASE:
            raise ValueError(f"tag {t} is not allowed on a diagram output")
        phase[v] = _TAG_PHASE[t]
        free.append((v, "out", g._onum[v], t in (TAG_H, TAG_HZ)))
    for i, w in enumerate(g.inputs):
        free.append((w, "in", i, False))

    changed = True
    while changed:
        changed = False
        for v in sorted(alive):
            if phase[v]:
                continue
            ie = [e for e in internal if v == e[0] or v == e[1]]
            fe = [f for f in free if f[0] == v]
            if len(ie) != 1 or len(fe) != 1:
                continue
            other = ie[0][1] if ie[0][0] == v else ie[0][0]
            _, kind, wire, h = fe[0]
            h ^= ie[0][2]
            if kind == "in":
                h = False
            internal.remove(ie[0])
            free.remove(fe[0])
            free.append((other, kind, wire, h))
            alive.remove(v)
            changed = True
            break

    if normalize_output_basis:
        for u in sorted(alive):
            if phase[u]:
                continue
            outs = [f for f in free if f[0] == u and f[1] == "out"]
            ins = [f for f in free if f[0] == u and f[1] == "in"]
            ie = [e for e in internal if u == e[0] or u == e[1]]
            if len(outs) < 2 or len(ins) + len(ie) > 1:
                continue
            if not min(outs, key=lambda f: f[2])[3]:
                continue
            for f in outs:
                free.remove(f)
                free.append((f[0], f[1], f[2], not f[3]))

    nodes = tuple(sorted(alive))
    return ReducedDiagram(
        g.n,
        g.k,
        nodes,
        tuple(phase[v] for v in nodes),
        tuple(sorted((u, v, h) for u, v, h in internal)),
        tuple(sorted(free)),
    )
