"""Layered circuit synthesis for graph codes.

A graph code reads off its own encoder: outputs become wires, each
input enters on its pivot's wire, and every edge becomes a CZ placed
around a single layer of Hadamards on the pivot wires.  Packing each
CZ stage with an edge coloring caps the depth at 2*maxdeg + 3, linear
in the maximum degree rather than in the size of the graph.

The same layering gives short logical gates.  A diagonal logical
unitary commutes through the input-output CZ stage of the encoder, so
conjugating it by the remaining stages leaves a five-stage sandwich.
A logical sqrt(X) on an input costs a complementation of the input's
neighborhood plus one layer of S gates; the circuit is returned
together with the complemented graph because the gate trades one
presentation of the code for the other.  Anything else falls back to
unencoding, acting on the bare logical wires, and reencoding.

Depth counts greedy left-to-right layers of gates; initializations
are free, as in circuit diagrams where fresh ancillas appear already
prepared.
"""

from __future__ import annotations

from itertools import combinations

from .compiler import Circuit
from .core import PauliString
from .graphcode import GraphCode, _require_valid, canonical_stabilizers

__all__ = [
    "color_edges",
    "depth",
    "dump_text",
    "synth_diagonal_logical",
    "synth_encoder",
    "synth_generic_logical",
    "synth_sqrt_x_logical",
    "transversal_h_preserves_code",
]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# Edge coloring

def _edge_list(g) -> list:
    edges = g.edges() if callable(getattr(g, "edges", None)) else g
    out = []
    seen = set()
    for u, v in edges:
        u, v = int(u), int(v)
        if u == v:
            raise ValueError("self loops cannot be edge colored")
        e = (u, v) if u < v else (v, u)
        if e not in seen:
            seen.add(e)
            out.append(e)
    out.sort()
    return out


def _free(at, v) -> int:
    c = 0
    while c in at[v]:
        c += 1
    return c


def _set_color(at, ecol, u, v, c):
    at[u][c] = v
    at[v][c] = u
    ecol[(u, v) if u < v else (v, u)] = c


def _unset_color(at, ecol, u, v) -> int:
    c = ecol.pop((u, v) if u < v else (v, u))
    del at[u][c]
    del at[v][c]
    return c


def _invert_path(at, ecol, u, c, d):
    """Swap colors c and d along the maximal path leaving u on color d."""
    verts = [u]
    col = d
    while True:
        nxt = at[verts[-1]].get(col)
        if nxt is None:
            break
        verts.append(nxt)
        col = c if col == d else d
    flips = [
        (a, b, _unset_color(at, ecol, a, b)) for a, b in zip(verts, verts[1:])
    ]
    for a, b, old in flips:
        _set_color(at, ecol, a, b, c if old == d else d)


def _is_fan(at, ecol, u, seq) -> bool:
    # each edge's color must be free at the preceding fan vertex
    for a, b in zip(seq, seq[1:]):
        c = ecol.get((u, b) if u < b else (b, u))
        if c is None or c in at[a]:
            return False
    return True


def _color_one(at, ecol, u, v):
    fan = [v]
    infan = {v}
    while True:
        w = at[u].get(_free(at, fan[-1]))
        if w is None or w in infan:
            break
        fan.append(w)
        infan.add(w)
    c = _free(at, u)
    d = _free(at, fan[-1])
    if d != c and d in at[u]:
        _invert_path(at, ecol, u, c, d)
    for i, w in enumerate(fan):
        if d not in at[w] and _is_fan(at, ecol, u, fan[: i + 1]):
            fan = fan[: i + 1]
            break
    else:
        raise AssertionError("fan lost its landing spot")
    # rotate: each fan edge takes its successor's color, the last takes d
    for a, b in zip(fan, fan[1:]):
        _set_color(at, ecol, u, a, _unset_color(at, ecol, u, b))
    _set_color(at, ecol, u, fan[-1], d)


def color_edges(g) -> dict:
    """Color edges so no two edges at a vertex share a color.

    Misra-Gries fan rotation, at most maxdeg + 1 colors.  Accepts
    anything with an edges() method or a bare iterable of vertex
    pairs; returns {(u, v): color} with each pair sorted.  Output is
    deterministic for a given edge set.
    """
    at = {}
    ecol = {}
    for u, v in _edge_list(g):
        at.setdefault(u, {})
        at.setdefault(v, {})
        _color_one(at, ecol, u, v)
    return ecol


# ---------------------------------------------------------------------------
# Encoding circuits

def _layout(g: GraphCode):
    """Wire map and colored CZ stages shared by the synthesizers."""
    _require_valid(g)
    wire = {v: g.output_number(v) for v in g.outputs}
    pivot_of = dict(g.pairs)
    stage_io = {}
    stage_oo = {}
    for (u, v), c in sorted(color_edges(g).items()):
        if g.is_input(v):
            u, v = v, u
        if g.is_input(u):
            if v != pivot_of[u]:
                # placed on the wires: the input rides its pivot's wire
                stage_io.setdefault(c, []).append((wire[pivot_of[u]], wire[v]))
        else:
            stage_oo.setdefault(c, []).append((wire[u], wire[v]))
    return wire, stage_io, stage_oo


def synth_encoder(g: GraphCode, variant: str = "theorem") -> Circuit:
    """Encoding circuit of a graph code, depth at most 2*maxdeg + 3.

    Wires follow output numbering and each input enters on its pivot's
    wire.  The "theorem" variant prepares the non-pivot wires in |+>,
    applies the input-output CZ's, one Hadamard per pivot wire, then
    the output-output CZ's.  The "appendixG" variant prepares the
    spares in |0>, opens with Hadamards on all wires, and replaces the
    first CZ stage by CX's controlled on the output wire.  Each
    two-qubit stage is packed into layers by edge coloring, and the
    input-pivot edges themselves become the Hadamard layer.
    """
    if not isinstance(g, GraphCode):
        raise TypeError("synth_encoder expects a GraphCode")
    if variant not in ("theorem", "appendixG"):
        raise ValueError(f"unknown variant {variant!r}")
    wire, stage_io, stage_oo = _layout(g)
    pivot_wires = sorted(wire[p] for p in g.pivots)
    spare = sorted(set(range(g.n)) - set(pivot_wires))
    ops = []
    if variant == "theorem":
        ops += [("init", "+", (w,)) for w in spare]
        for c in sorted(stage_io):
            ops += [("unitary", "CZ", pair) for pair in stage_io[c]]
        ops += [("unitary", "H", (w,)) for w in pivot_wires]
    else:
        ops += [("init", "0", (w,)) for w in spare]
        ops += [("unitary", "H", (w,)) for w in range(g.n)]
        for c in sorted(stage_io):
            ops += [("unitary", "CX", (b, a)) for a, b in stage_io[c]]
    for c in sorted(stage_oo):
        ops += [("unitary", "CZ", pair) for pair in stage_oo[c]]
    return Circuit(g.n, ops)


# ---------------------------------------------------------------------------
# Logical gates

def _check_logical(g: GraphCode, u: Circuit):
    if not isinstance(u, Circuit):
        raise TypeError("logical operation must be a Circuit")
    if u.n != g.k:
        raise ValueError(f"logical circuit acts on {u.n} wires, code has k={g.k}")
    if any(kind == "init" for kind, _, _ in u.ops):
        raise ValueError("logical circuit must be unitary")


def synth_generic_logical(g: GraphCode, u: Circuit) -> Circuit:
    """Unencode, act on the bare logical wires, reencode.

    u is a unitary circuit on k wires; its gate names pass through
    untouched, so opaque blocks are fine.  Depth is at most
    4*maxdeg + 6 + depth(u).
    """
    _check_logical(g, u)
    enc = synth_encoder(g)
    # encoder gates are H and CZ, each self inverse
    gates = [op for op in enc.ops if op[0] == "unitary"]
    pivot_wire = [g.output_number(p) for _, p in g.pairs]
    mid = [
        ("unitary", gate, tuple(pivot_wire[q] for q in qs))
        for _, gate, qs in u.ops
    ]
    return Circuit(g.n, list(reversed(gates)) + mid + gates)


_DIAGONAL_GATES = {"I", "Z", "S", "SDG", "T", "TDG", "CZ", "CS", "CSDG", "CCZ"}


def synth_diagonal_logical(g: GraphCode, u: Circuit) -> Circuit:
    """Sandwich a diagonal logical unitary: CZ, H, u, H, CZ.

    Diagonal gates commute through the encoder's input-output CZ
    stage, which therefore cancels against its own inverse; only the
    output-output stage and the pivot Hadamards survive around u.
    Depth is at most 2*maxdeg + 4 + depth(u).  Gates must be diagonal
    by name: one of the known diagonal set or any name starting with
    "DIAG" for opaque diagonal blocks.
    """
    _check_logical(g, u)
    for _, gate, _ in u.ops:
        if gate not in _DIAGONAL_GATES and not gate.startswith("DIAG"):
            raise ValueError(f"gate {gate!r} is not diagonal")
    wire, _, stage_oo = _layout(g)
    pivot_wire = [wire[p] for _, p in g.pairs]
    czs = []
    for c in sorted(stage_oo):
        czs += [("unitary", "CZ", pair) for pair in stage_oo[c]]
    hs = [("unitary", "H", (w,)) for w in sorted(pivot_wire)]
    mid = [
        ("unitary", gate, tuple(pivot_wire[q] for q in qs))
        for _, gate, qs in u.ops
    ]
    return Circuit(g.n, czs + hs + mid + hs + czs)


def synth_sqrt_x_logical(g: GraphCode, v: int) -> tuple:
    """Logical sqrt(X) on input v: complement N(v), then S on N(v).

    Returns (circuit, code) where code is g with the edges inside
    N(v) complemented.  The circuit maps codewords to codewords of
    the returned code while acting as logical sqrt(X) on input v, and
    the same holds starting from the returned code; depth is at most
    deg(v) + 1.  The neighborhood of an input holds no other input,
    so every gate lands on a physical wire.
    """
    g.validate()
    if not g.is_input(v):
        raise ValueError(f"vertex {v} is not an input")
    nb = sorted(_bits(g.adj[v]))
    wire = {u: g.output_number(u) for u in nb}
    kcol = color_edges(combinations(nb, 2))
    ops = []
    for c in sorted(set(kcol.values())):
        ops += [
            ("unitary", "CZ", (wire[a], wire[b]))
            for (a, b), cc in sorted(kcol.items())
            if cc == c
        ]
    ops += [("unitary", "S", (wire[u],)) for u in nb]
    edges = set(g.edges())
    for pair in combinations(nb, 2):
        edges ^= {pair}
    flipped = GraphCode(g.n, g.inputs, g.pivots, sorted(edges))
    return Circuit(g.n, ops), flipped


# ---------------------------------------------------------------------------
# Inspection

def depth(c: Circuit) -> int:
    """Greedy left-to-right layer count; initializations are free."""
    last = [0] * c.n
    for kind, _, qs in c.ops:
        if kind == "init":
            continue
        layer = 1 + max(last[q] for q in qs)
        for q in qs:
            last[q] = layer
    return max(last, default=0)


def dump_text(c: Circuit) -> str:
    """Flat dump, one op per line: "init+ 3" or gate name then wires."""
    lines = []
    for kind, gate, qs in c.ops:
        if kind == "init":
            lines.append(f"init{gate} {qs[0]}")
        else:
            lines.append(" ".join((gate, *map(str, qs))))
    return "\n".join(lines)


def transversal_h_preserves_code(g: GraphCode) -> bool:
    """Whether a Hadamard on every output maps the codespace onto itself.

    Conjugates each canonical stabilizer by the Hadamard layer and
    tests membership in the stabilizer group, signs included, by
    GF(2) elimination.  Codes of the self dual CSS kind pass; most
    others do not.
    """
    rows = canonical_stabilizers(g)
    n = g.n
    basis = {}
    for p in rows:
        mask = p.x | (p.z << n)
        q = p
        while mask:
            lead = mask.bit_length() - 1
            if lead not in basis:
                basis[lead] = (mask, q)
                break
            bm, bq = basis[lead]
            mask ^= bm
            q = q * bq
    ident = PauliString(n, 0, 0, 0)
    for p in rows:
        mask = p.z | (p.x << n)
        q = PauliString(n, p.z, p.x, (p.phase + 2 * (p.x & p.z).bit_count()) % 4)
        while mask:
            lead = mask.bit_length() - 1
            if lead not in basis:
                return False
            bm, bq = basis[lead]
            mask ^= bm
            q = q * bq
        if q != ident:
            return False
    return True
