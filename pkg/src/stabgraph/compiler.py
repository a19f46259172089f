"""Compiling stabilizer codes into a canonical diagram form.

The pipeline runs tableau -> encoder circuit -> decorated graph code and
back again.  A `ZxcfDiagram` is a graph code whose outputs may carry one
of the six canonical local Clifford tags, subject to the canonicity
rules enforced by `zxcf_check`: tags stay off the pivots, H-like tags
sit only on outputs whose neighbors all come later, the input rows of
the adjacency matrix are in reduced row echelon form with the pivots as
pivot columns, and no edge joins two inputs or two pivots.  Exactly one
such diagram exists per code (the counting functions at the bottom make
the two sides of that bijection concrete), so compiling two tableaus and
comparing diagrams decides whether they cut out the same codespace.

`encoder_to_zxcf` replays the circuit on a graph-state presentation of
its Choi state, with input vertices numbered below all outputs so that
canonicalization pushes H-like tags away from the input side.  The
leftover gauge on the inputs (local Cliffords, input-input edges, the
basis choice for the input rows) is then squeezed out by explicit graph
surgery: row reduction acts directly on input rows, a pivot tag is
peeled off by locally complementing at its input, and a pivot-pivot edge
is removed by complementing between the two closed input neighborhoods.
Each surgery step is a unitary on the input side, so the encoded code
never changes.
"""

from __future__ import annotations

from functools import lru_cache
from types import MappingProxyType
from typing import Mapping, Sequence

from .core import (
    TAG_H,
    TAG_HZ,
    TAG_I,
    TAG_S,
    TAG_SZ,
    TAG_X,
    TAG_Y,
    TAG_Z,
    PauliString,
    Tableau,
    gf2_rref,
    pauli_conjugate_layer,
    tableau_valid,
    tag_mul,
    tag_name,
)
from .graphcode import GraphCode, canonical_stabilizers
from .graphstate import ExtendedGraphState, apply_cz, apply_local, canonicalize

__all__ = [
    "Circuit",
    "ZxcfDiagram",
    "codes_equal",
    "compile_tableau",
    "count_tableaus",
    "count_zxcf",
    "encoder_to_zxcf",
    "tableau_to_encoder",
    "zxcf_check",
    "zxcf_to_tableau",
]


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# ---------------------------------------------------------------------------
# Circuits

_GATE_QUBITS = {
    "I": 1,
    "X": 1,
    "Y": 1,
    "Z": 1,
    "H": 1,
    "S": 1,
    "SDG": 1,
    "T": 1,
    "TDG": 1,
    "CZ": 2,
    "CX": 2,
    "CS": 2,
    "CSDG": 2,
    "CH": 2,
    "SWAP": 2,
    "CCZ": 3,
    "CCX": 3,
    "CSWAP": 3,
}


class Circuit:
    """An ordered list of wire initializations and named gates.

    Wires never initialized are the circuit's inputs, so a circuit on n
    wires with n - k initializations is an isometry from k qubits into
    n.  Each op is a triple (kind, gate, qubits) with kind "init" or
    "unitary"; initializations prepare "0" or "+" and must precede any
    gate on their wire.
    Gate names are uninterpreted strings here, checked only for arity
    when recognized; consumers reject what they cannot handle.
    """

    __slots__ = ("n", "ops")

    def __init__(self, n: int, ops: Sequence = ()):
        n = int(n)
        if n < 0:
            raise ValueError("wire count must be nonnegative")
        clean = []
        used = set()
        inited = set()
        for op in ops:
            kind, gate, qubits = op
            qs = tuple(int(q) for q in qubits)
            if any(q < 0 or q >= n for q in qs):
                raise ValueError(f"qubit out of range in {op!r}")
            if len(set(qs)) != len(qs):
                raise ValueError(f"repeated qubit in {op!r}")
            if kind == "init":
                if gate not in ("0", "+"):
                    raise ValueError(f"unknown initialization {gate!r}")
                if len(qs) != 1:
                    raise ValueError("initializations take exactly one wire")
                if qs[0] in inited:
                    raise ValueError(f"wire {qs[0]} initialized twice")
                if qs[0] in used:
                    raise ValueError(f"wire {qs[0]} used before initialization")
                inited.add(qs[0])
            elif kind == "unitary":
                want = _GATE_QUBITS.get(gate)
                if want is not None and want != len(qs):
                    raise ValueError(f"{gate} takes {want} qubits")
            else:
                raise ValueError(f"unknown op kind {kind!r}")
            used.update(qs)
            clean.append((kind, gate, qs))
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "ops", tuple(clean))

    def __setattr__(self, name, value):
        raise AttributeError("Circuit is immutable")

    @property
    def inputs(self) -> tuple:
        """Wires never initialized, ascending."""
        inited = {qs[0] for kind, _, qs in self.ops if kind == "init"}
        return tuple(w for w in range(self.n) if w not in inited)

    @property
    def k(self) -> int:
        return self.n - sum(1 for kind, _, _ in self.ops if kind == "init")

    def __len__(self) -> int:
        return len(self.ops)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Circuit):
            return NotImplemented
        return (self.n, self.ops) == (other.n, other.ops)

    def __hash__(self) -> int:
        return hash((self.n, self.ops))

    def __repr__(self) -> str:
        return f"Circuit(n={self.n}, ops={len(self.ops)}, k={self.k})"

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "ops": [
                {"kind": kind, "gate": gate, "qubits": list(qs)}
                for kind, gate, qs in self.ops
            ],
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> Circuit:
        return Circuit(
            data["n"],
            [(o["kind"], o["gate"], o["qubits"]) for o in data["ops"]],
        )


# ---------------------------------------------------------------------------
# Decorated graph codes

_CANON_TAGS = (TAG_I, TAG_Z, TAG_S, TAG_SZ, TAG_H, TAG_HZ)
_TAG_BY_NAME = {tag_name(c): c for c in _CANON_TAGS}


class ZxcfDiagram:
    """A graph code with local Clifford tags on some of its outputs.

    Tags are one of the six canonical single-qubit Cliffords, given as
    indices or names ("Z", "S", "SZ", "H", "HZ"); identity tags are
    dropped.  Construction checks only that tags sit on outputs; full
    canonicity is the business of `zxcf_check`.
    """

    __slots__ = ("graph", "tags")

    def __init__(self, graph: GraphCode, tags: Mapping | None = None):
        if not isinstance(graph, GraphCode):
            raise TypeError("graph must be a GraphCode")
        clean = {}
        for v, t in dict(tags or {}).items():
            v = int(v)
            if isinstance(t, str):
                if t not in _TAG_BY_NAME:
                    raise ValueError(f"tag {t!r} is not canonical")
                t = _TAG_BY_NAME[t]
            if t not in _CANON_TAGS:
                raise ValueError(f"tag {t} is not canonical")
            if not 0 <= v < graph.n + graph.k:
                raise ValueError(f"tagged vertex {v} out of range")
            if graph.is_input(v):
                raise ValueError(f"tag on input vertex {v}")
            if t != TAG_I:
                clean[v] = t
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "tags", MappingProxyType(dict(sorted(clean.items()))))

    def __setattr__(self, name, value):
        raise AttributeError("ZxcfDiagram is immutable")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ZxcfDiagram):
            return NotImplemented
        return self.graph == other.graph and dict(self.tags) == dict(other.tags)

    def __hash__(self) -> int:
        return hash((self.graph, tuple(self.tags.items())))

    def __repr__(self) -> str:
        return (
            f"ZxcfDiagram(n={self.graph.n}, k={self.graph.k}, "
            f"tags={ {v: tag_name(t) for v, t in self.tags.items()} })"
        )

    def to_json_dict(self) -> dict:
        data = self.graph.to_json_dict()
        data["outputs"] = list(self.graph.outputs)
        data["local"] = {str(v): tag_name(t) for v, t in self.tags.items()}
        return data

    @staticmethod
    def from_json_dict(data: Mapping) -> ZxcfDiagram:
        graph = GraphCode.from_json_dict(data)
        tags = {int(v): t for v, t in data.get("local", {}).items()}
        return ZxcfDiagram(graph, tags)

    def to_dot(self, name: str = "diagram") -> str:
        piv = set(self.graph.pivots)
        lines = [f"graph {name} {{", "  node [shape=circle];"]
        for v in range(self.graph.n + self.graph.k):
            if self.graph.is_input(v):
                colour = "blue"
            elif v in piv:
                colour = "orange"
            else:
                colour = "black"
            label = str(v)
            if v in self.tags:
                label = f"{v}:{tag_name(self.tags[v])}"
            lines.append(f'  {v} [color="{colour}" label="{label}"];')
        for u, v in self.graph.edges():
            lines.append(f"  {u} -- {v};")
        lines.append("}")
        return "\n".join(lines)


def zxcf_check(d) -> list:
    """All canonicity violations of a decorated graph code, as strings.

    Empty means canonical.  Checks four rules: tags are canonical, sit
    on outputs and stay off pivots; H-like tags sit only on outputs all
    of whose neighbors are later outputs; the input rows of the
    adjacency matrix form a reduced row echelon matrix whose pivot
    columns are the matched pivots, in order; and no edge joins two
    inputs or two pivots.
    """
    g = d.graph
    tags = {v: t for v, t in dict(d.tags).items() if t != TAG_I}
    bad = []
    pivset = set(g.pivots)
    for u, v in g.edges():
        if g.is_input(u) and g.is_input(v):
            bad.append(f"edge rule: edge ({u}, {v}) joins two inputs")
        if u in pivset and v in pivset:
            bad.append(f"edge rule: edge ({u}, {v}) joins two pivots")
    for v, t in sorted(tags.items()):
        if t not in _CANON_TAGS:
            bad.append(f"clifford rule: tag {t} on vertex {v} is not canonical")
        elif g.is_input(v):
            bad.append(f"clifford rule: tag on input vertex {v}")
        elif v in pivset:
            bad.append(f"clifford rule: tag {tag_name(t)} on pivot {v}")
    for v, t in sorted(tags.items()):
        if t not in (TAG_H, TAG_HZ) or g.is_input(v):
            continue
        for u in _bits(g.adj[v]):
            if g.is_input(u):
                bad.append(f"hadamard rule: H-tagged output {v} touches input {u}")
            elif g.output_number(u) < g.output_number(v):
                bad.append(
                    f"hadamard rule: H-tagged output {v} touches earlier output {u}"
                )
    rows = []
    for w in g.inputs:
        row = 0
        for u in _bits(g.adj[w]):
            if not g.is_input(u):
                row |= 1 << g.output_number(u)
        rows.append(row)
    last = -1
    for i, (w, p) in enumerate(zip(g.inputs, g.pivots)):
        col = g.output_number(p)
        if not rows[i] >> col & 1:
            bad.append(f"rref rule: input {w} misses its pivot {p}")
            continue
        if rows[i] & ((1 << col) - 1):
            bad.append(f"rref rule: input {w} has entries before its pivot column")
        for i2 in range(len(rows)):
            if i2 != i and rows[i2] >> col & 1:
                bad.append(
                    f"rref rule: pivot column of {p} is shared by input {g.inputs[i2]}"
                )
        if col <= last:
            bad.append(f"rref rule: pivot columns out of order at input {w}")
        last = col
    return bad


# ---------------------------------------------------------------------------
# Tableau -> encoder circuit

_LOCAL_TAG = {
    "H": TAG_H,
    "S": TAG_S,
    "SDG": TAG_SZ,
    "X": TAG_X,
    "Y": TAG_Y,
    "Z": TAG_Z,
}


def _conj_cz(p: PauliString, u: int, v: int) -> PauliString:
    """CZ p CZ on qubits u and v."""
    xu = p.x >> u & 1
    xv = p.x >> v & 1
    z = p.z ^ (xu << v) ^ (xv << u)
    return PauliString(p.n, p.x, z, (p.phase + 2 * (xu & xv)) % 4)


def _conj_cx(p: PauliString, c: int, t: int) -> PauliString:
    """CX p CX with control c and target t."""
    xc = p.x >> c & 1
    xt = p.x >> t & 1
    zc = p.z >> c & 1
    zt = p.z >> t & 1
    x = p.x ^ (xc << t)
    z = p.z ^ (zt << c)
    before = (p.x & p.z).bit_count()
    after = (x & z).bit_count()
    ph = p.phase - before + after + 2 * (xc & zt & (xt ^ zc ^ 1))
    return PauliString(p.n, x, z, ph % 4)


def tableau_to_encoder(t: Tableau) -> Circuit:
    """Synthesize an encoder circuit whose image is the tableau's codespace.

    Processes one generator at a time: local gates turn every letter of
    the generator into Z, an X repairs the sign, CX gates fold the
    support onto one wire, and that wire is projected onto 0.  Reading
    the record backwards with inverted gates and the projections turned
    into initializations gives the encoder; the wires never projected
    are its k inputs.
    """
    if not tableau_valid(t):
        raise ValueError("invalid tableau")
    n = t.n
    rows = list(t.rows)
    fwd = []

    def emit(gate, *qs):
        fwd.append(("unitary", gate, qs))
        if gate == "CX":
            rows[:] = [_conj_cx(r, qs[0], qs[1]) for r in rows]
        else:
            layer = [TAG_I] * n
            layer[qs[0]] = _LOCAL_TAG[gate]
            rows[:] = [pauli_conjugate_layer(r, layer) for r in rows]

    for step in range(len(t.rows)):
        g = rows[0]
        support = [u for u in range(n) if (g.x | g.z) >> u & 1]
        v = support[0]
        for u in support:
            if g.x >> u & 1 and g.z >> u & 1:
                emit("S", u)
                emit("H", u)
            elif g.x >> u & 1:
                emit("H", u)
        if rows[0].sign:
            emit("X", v)
        for u in support[1:]:
            emit("CX", u, v)
        assert rows[0] == PauliString(n, 0, 1 << v, 0)
        rows.pop(0)
        fwd.append(("meas", "0", (v,)))
        for i, r in enumerate(rows):
            assert not r.x >> v & 1
            if r.z >> v & 1:
                rows[i] = PauliString(n, r.x, r.z ^ 1 << v, r.phase)

    inv = {"S": "SDG", "SDG": "S"}
    enc = []
    for kind, gate, qs in reversed(fwd):
        if kind == "meas":
            enc.append(("init", "0", qs))
        else:
            enc.append(("unitary", inv.get(gate, gate), qs))
    return Circuit(n, enc)


# ---------------------------------------------------------------------------
# Encoder circuit -> canonical diagram

_REPLAY_TAG = {
    "I": TAG_I,
    "X": TAG_X,
    "Y": TAG_Y,
    "Z": TAG_Z,
    "H": TAG_H,
    "S": TAG_S,
    "SDG": TAG_SZ,
}


def _replay_cx(s, ctl, tgt):
    s = apply_local(s, tgt, TAG_H)
    s = apply_cz(s, ctl, tgt)
    return apply_local(s, tgt, TAG_H)


def encoder_to_zxcf(c: Circuit) -> ZxcfDiagram:
    """Compile a Clifford encoder circuit to its canonical diagram.

    Builds the circuit's Choi state as an extended graph state, with
    the j-th input wire held by vertex j and physical wire w by vertex
    k + w, replays the ops, canonicalizes, and squeezes out the input
    gauge.  Raises ValueError on non-Clifford gates.
    """
    k = c.k
    n = c.n
    edges = []
    local = {}
    for j, w in enumerate(c.inputs):
        edges.append((j, k + w))
        local[j] = TAG_H
    s = ExtendedGraphState(n + k, edges, local)
    for kind, gate, qs in c.ops:
        if kind == "init":
            if gate == "0":
                s = apply_local(s, k + qs[0], TAG_H)
        elif gate in _REPLAY_TAG:
            s = apply_local(s, k + qs[0], _REPLAY_TAG[gate])
        elif gate == "CZ":
            s = apply_cz(s, k + qs[0], k + qs[1])
        elif gate == "CX":
            s = _replay_cx(s, k + qs[0], k + qs[1])
        elif gate == "SWAP":
            a, b = k + qs[0], k + qs[1]
            s = _replay_cx(s, a, b)
            s = _replay_cx(s, b, a)
            s = _replay_cx(s, a, b)
        else:
            raise ValueError(f"gate {gate!r} is not Clifford")
    s = canonicalize(s)
    return _squeeze_inputs(s, n, k)


def _lc_at_input(adj, tags, v):
    """Complement among the neighbors of input v, right-multiplying S.

    Applying sqrt(X) on the input commutes past the encoder into this
    move; the neighbors are outputs without H-like tags, so their tags
    stay in the S powers.
    """
    nb = adj[v]
    for u in _bits(nb):
        adj[u] ^= nb & ~(1 << u)
        tags[u] = tag_mul(tags[u], TAG_S)[0]


def _edge_lc_at_inputs(adj, tags, a, b, k):
    """Complement between the closed neighborhoods of inputs a and b.

    Applying H on both inputs of a fresh a-b edge trades the edge set
    between the two closed neighborhoods for a Z on every common
    neighbor, swapping the two input rows in the process; input-side
    Paulis and the a-b edge itself are gauge and dropped.
    """
    adj[a] |= 1 << b
    adj[b] |= 1 << a
    na = adj[a] | 1 << a
    nb = adj[b] | 1 << b
    for x in _bits(na | nb):
        m = 0
        if na >> x & 1:
            m ^= nb
        if nb >> x & 1:
            m ^= na
        m &= ~(1 << x)
        adj[x] ^= m
    for w in _bits(na & nb):
        if w >= k:
            tags[w] = tag_mul(tags[w], TAG_Z)[0]
    adj[a] &= ~(1 << b)
    adj[b] &= ~(1 << a)


def _squeeze_inputs(s, n: int, k: int) -> ZxcfDiagram:
    """Remove the input gauge from a canonical Choi graph state."""
    adj = list(s.adj)
    tags = list(s.tags)
    imask = (1 << k) - 1

    # local Cliffords and edges on the input side act before the
    # encoder, so they never change the encoded code
    for j in range(k):
        tags[j] = TAG_I
        adj[j] &= ~imask

    # canonical basis for the input rows
    rows = [adj[j] >> k for j in range(k)]
    red, pivcols = gf2_rref(rows, n)
    if len(pivcols) != k:
        raise ValueError("encoder inputs are not independent")
    for j in range(k):
        adj[j] = red[j] << k
    for w in range(n):
        m = 0
        for j in range(k):
            if red[j] >> w & 1:
                m |= 1 << j
        adj[k + w] = (adj[k + w] & ~imask) | m

    # peel tags off the pivots; each neighborhood complement multiplies
    # the pivot tag by one more S
    for j in range(k):
        p = k + pivcols[j]
        while tags[p] != TAG_I:
            _lc_at_input(adj, tags, j)

    # remove pivot-pivot edges, smallest pair first; each move clears
    # one such edge and never creates another
    pivmask = 0
    for col in pivcols:
        pivmask |= 1 << (k + col)
    while True:
        found = None
        for p1 in _bits(pivmask):
            hit = adj[p1] & pivmask & -(2 << p1)
            if hit:
                p2 = (hit & -hit).bit_length() - 1
                found = (p1, p2)
                break
        if found is None:
            break
        p1, p2 = found
        (a,) = _bits(adj[p1] & imask)
        (b,) = _bits(adj[p2] & imask)
        _edge_lc_at_inputs(adj, tags, a, b, k)

    # rows may have traded owners above; hand them out by pivot order
    order = sorted(range(k), key=lambda j: adj[j] & -adj[j])
    edges = []
    pivots = []
    for i, j in enumerate(order):
        row = adj[j] >> k
        pivots.append(k + (row & -row).bit_length() - 1)
        for w in _bits(row):
            edges.append((i, k + w))
    for w in range(n):
        for w2 in _bits(adj[k + w] >> k):
            if w2 > w:
                edges.append((k + w, k + w2))
    gtags = {k + w: tags[k + w] for w in range(n) if tags[k + w] != TAG_I}
    d = ZxcfDiagram(GraphCode(n, tuple(range(k)), tuple(pivots), edges), gtags)
    bad = zxcf_check(d)
    if bad:
        raise AssertionError("compiled diagram is not canonical: " + "; ".join(bad))
    return d


# ---------------------------------------------------------------------------
# Diagram -> tableau, equality, compilation

def zxcf_to_tableau(d: ZxcfDiagram) -> Tableau:
    """Stabilizer tableau of a canonical diagram, with exact signs."""
    bad = zxcf_check(d)
    if bad:
        raise ValueError("diagram is not canonical: " + bad[0])
    g = d.graph
    layer = [TAG_I] * g.n
    for v, t in d.tags.items():
        layer[g.output_number(v)] = t
    rows = tuple(pauli_conjugate_layer(r, layer) for r in canonical_stabilizers(g).rows)
    return Tableau(g.n, rows)


def compile_tableau(t: Tableau) -> ZxcfDiagram:
    """Canonical diagram of the code cut out by a tableau."""
    return encoder_to_zxcf(tableau_to_encoder(t))


def codes_equal(t1: Tableau, t2: Tableau) -> bool:
    """Whether two tableaus cut out the same codespace.

    Both sides are compiled to their canonical diagram and compared
    structurally.  Tableaus on different qubit counts are a usage
    error; different check counts on the same qubits simply differ.
    """
    if t1.n != t2.n:
        raise ValueError("codes live on different qubit counts")
    if len(t1.rows) != len(t2.rows):
        return False
    return compile_tableau(t1) == compile_tableau(t2)


# ---------------------------------------------------------------------------
# Counting

def count_tableaus(n: int, m: int) -> int:
    """Number of codespaces on n qubits cut out by m independent checks."""
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    num = 1
    den = 1
    for i in range(1, m + 1):
        num *= (1 << (2 * n - i + 2)) - (1 << i)
        den *= (1 << m) - (1 << (i - 1))
    q, r = divmod(num, den)
    assert not r
    return q


@lru_cache(maxsize=None)
def _zxcf_count(n: int, m: int, p: int, o: int) -> int:
    if n == 0:
        return 1
    total = 0
    if n > m:
        total += (1 << o) * _zxcf_count(n - 1, m, p + 1, o)
    if m > 0:
        total += ((1 << (2 * p + o + 2)) + 2) * _zxcf_count(n - 1, m - 1, p, o + 1)
    return total


def count_zxcf(n: int, m: int) -> int:
    """Number of canonical diagrams with n outputs and m checks.

    Counted by scanning the outputs from last to first, tracking how
    many pivots (p) and checked outputs (o) have been passed; a pivot
    may connect backwards to passed outputs, a checked output to passed
    pivots and outputs with an H/S/none choice folded into the factor.
    """
    if not 0 <= m <= n:
        raise ValueError("need 0 <= m <= n")
    return _zxcf_count(n, m, 0, 0)
