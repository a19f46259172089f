"""Extended graph states and their exact update algebra.

An extended graph state is a simple graph together with a single-qubit
Clifford tag on every vertex and one global scalar: the represented vector
is ``scalar * (tensor of tags) * |G>`` where ``|G>`` is the plain graph
state of the adjacency.  Everything here tracks that vector exactly,
including the global phase, using the ring arithmetic from ``core``.

The central routine is ``canonicalize``, which rewrites any extended graph
state into the unique normal form where every tag lies in
{I, Z, S, SZ, H, HZ} and no H-tagged vertex has an edge to a lower-numbered
vertex.  On top of it sit the controlled-Z update rules, Pauli projections
and measurements, and a phase-sensitive inner product.
"""

from __future__ import annotations

from typing import Iterable, Iterator, Mapping, Sequence

from .core import (
    CLIFFORD_ADJ,
    CLIFFORD_CONJ_DAG,
    CLIFFORD_LEFTDEC,
    TAG_H,
    TAG_I,
    TAG_S,
    TAG_SZ,
    TAG_Z,
    TAG_HSH_X,
    PauliString,
    Scalar8,
    pauli_conjugate_layer,
    tag_mul,
    tag_name,
    tag_of_word,
)

__all__ = [
    "ExtendedGraphState",
    "HkForm",
    "canonicalize",
    "local_complement",
    "apply_cz",
    "apply_local",
    "project_pauli",
    "project_pauli_string",
    "measure_pauli",
    "inner_product",
    "support",
]


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class ExtendedGraphState:
    """Immutable graph + tags + scalar triple; operations return new states."""

    __slots__ = ("n", "adj", "tags", "scalar", "canonical")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]] = (),
        local: Mapping[int, int | str] | Sequence[int] | None = None,
        scalar: Scalar8 | None = None,
        *,
        canonical: bool = False,
    ):
        if n < 0:
            raise ValueError("vertex count must be nonnegative")
        adj = [0] * n
        for u, v in edges:
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range")
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        tags = [TAG_I] * n
        sc = Scalar8.one() if scalar is None else scalar
        if local is not None:
            items = local.items() if isinstance(local, Mapping) else enumerate(local)
            for v, g in items:
                v = int(v)
                if not 0 <= v < n:
                    raise ValueError(f"tag vertex {v} out of range")
                if isinstance(g, str):
                    c, j = tag_of_word(g)
                    tags[v] = c
                    if j:
                        sc = sc * Scalar8.omega_pow(j)
                else:
                    if not 0 <= g < 24:
                        raise ValueError(f"tag index {g} out of range")
                    tags[v] = g
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "adj", tuple(adj))
        object.__setattr__(self, "tags", tuple(tags))
        object.__setattr__(self, "scalar", sc)
        object.__setattr__(self, "canonical", canonical)

    def __setattr__(self, name, value):
        raise AttributeError("ExtendedGraphState is immutable")

    # -- views

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in _bits(self.adj[u]) if u < v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(_bits(self.adj[v]))

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.adj[u] >> v) & 1)

    def key(self) -> tuple:
        """Hashable identity of the graph-and-tags part, scalar excluded."""
        return (self.n, self.adj, self.tags)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ExtendedGraphState):
            return NotImplemented
        return (
            self.n == other.n
            and self.adj == other.adj
            and self.tags == other.tags
            and self.scalar == other.scalar
        )

    def __hash__(self) -> int:
        return hash((self.key(), self.scalar))

    def __repr__(self) -> str:
        tags = {v: tag_name(c) for v, c in enumerate(self.tags) if c != TAG_I}
        return (
            f"ExtendedGraphState(n={self.n}, edges={self.edges()}, "
            f"local={tags}, scalar={self.scalar!r})"
        )

    # -- serialization

    def to_json_dict(self) -> dict:
        sc = self.scalar
        return {
            "n": self.n,
            "edges": [list(e) for e in self.edges()],
            "local": {
                str(v): tag_name(c) for v, c in enumerate(self.tags) if c != TAG_I
            },
            "scalar": {"a": [sc.a0, sc.a1, sc.a2, sc.a3], "halfpow": sc.hp},
        }

    @staticmethod
    def from_json_dict(data: Mapping) -> ExtendedGraphState:
        sc = data.get("scalar")
        scalar = (
            Scalar8(*sc["a"], hp=sc["halfpow"]) if sc is not None else Scalar8.one()
        )
        return ExtendedGraphState(
            int(data["n"]),
            [(int(u), int(v)) for u, v in data.get("edges", [])],
            {int(v): w for v, w in data.get("local", {}).items()},
            scalar,
        )


HkForm = ExtendedGraphState  # canonical states carry `canonical=True`


# ---------------------------------------------------------------------------
# mutable worker


class _Work:
    __slots__ = ("n", "adj", "tags", "scalar")

    def __init__(self, s: ExtendedGraphState):
        self.n = s.n
        self.adj = list(s.adj)
        self.tags = list(s.tags)
        self.scalar = s.scalar

    def freeze(self, canonical: bool = False) -> ExtendedGraphState:
        out = ExtendedGraphState.__new__(ExtendedGraphState)
        object.__setattr__(out, "n", self.n)
        object.__setattr__(out, "adj", tuple(self.adj))
        object.__setattr__(out, "tags", tuple(self.tags))
        object.__setattr__(out, "scalar", self.scalar)
        object.__setattr__(out, "canonical", canonical)
        return out

    def phase(self, j: int) -> None:
        if j % 8:
            self.scalar = self.scalar * Scalar8.omega_pow(j)

    def rmul(self, v: int, g: int) -> None:
        """Attach g to vertex v on the graph side: tag <- tag * g."""
        c, j = tag_mul(self.tags[v], g)
        self.tags[v] = c
        self.phase(j)

    def lmul(self, v: int, g: int) -> None:
        """Apply g after the existing tag: tag <- g * tag."""
        c, j = tag_mul(g, self.tags[v])
        self.tags[v] = c
        self.phase(j)

    def toggle(self, u: int, v: int) -> None:
        self.adj[u] ^= 1 << v
        self.adj[v] ^= 1 << u

    def toggle_clique(self, mask: int) -> None:
        verts = list(_bits(mask))
        for i, u in enumerate(verts):
            for v in verts[i + 1 :]:
                self.toggle(u, v)

    def pair_toggles(self, a: int, b: int) -> None:
        """Graph effect of the CZ product over the ordered pairs A x B.

        An unordered pair gets toggled when it is covered an odd number of
        times; diagonal hits (vertices in both sets) are Z tags and are the
        caller's responsibility.
        """
        verts = list(_bits(a | b))
        for i, u in enumerate(verts):
            ua = (a >> u) & 1
            ub = (b >> u) & 1
            for v in verts[i + 1 :]:
                if (ua & ((b >> v) & 1)) ^ (ub & ((a >> v) & 1)):
                    self.toggle(u, v)


# ---------------------------------------------------------------------------
# local complementation

# Complementing the neighborhood of v is compensated on the state side by
# sqrt(X) on v and S on each neighbor: |G> = (HS'H)_v (prod S_u) |L_v(G)>.


def _vertex_lc(w: _Work, v: int) -> None:
    w.rmul(v, TAG_HSH_X)
    for u in _bits(w.adj[v]):
        w.rmul(u, TAG_S)
    w.toggle_clique(w.adj[v])


def local_complement(
    s: ExtendedGraphState, v: int, u: int | None = None
) -> ExtendedGraphState:
    """Complement around vertex v, or along edge (v, u) when u is given.

    The represented vector is unchanged; only the presentation moves.
    Edge mode composes three vertex complementations (v's side first).
    """
    w = _Work(s)
    if u is None:
        _vertex_lc(w, v)
    else:
        if not s.has_edge(u, v):
            raise ValueError(f"({v}, {u}) is not an edge")
        _vertex_lc(w, v)
        _vertex_lc(w, u)
        _vertex_lc(w, v)
    return w.freeze()


# ---------------------------------------------------------------------------
# canonicalization


def _slide_h(w: _Work, u: int, v: int) -> None:
    """Move the H half of u's tag onto its neighbor v < u.

    Uses the edge rewrite H_u H_v |G> = Z_u Z_v (CZ product over
    (N(u)+u) x (N(v)+v)) |G>, so H_u |G> = H_v Z_u Z_v (same product) |G>.
    The explicit Z's on u and v cancel the diagonal hits there.
    """
    j, p, d = CLIFFORD_LEFTDEC[w.tags[u]]
    w.phase(j)
    w.tags[u] = p
    a = w.adj[u] | (1 << u)
    b = w.adj[v] | (1 << v)
    w.rmul(v, TAG_H)
    for x in _bits((a & b) & ~((1 << u) | (1 << v))):
        w.rmul(x, TAG_Z)
    w.pair_toggles(a, b)


def _canonicalize_work(w: _Work) -> None:
    n = w.n
    cap = 16 * (n + 2) * (n + 2) + 64
    steps = 0
    while True:
        # drop every tag whose Clifford part still mixes H and S both ways
        progressed = True
        while progressed:
            progressed = False
            for v in range(n):
                if w.tags[v] >> 2 >= 3:
                    _vertex_lc(w, v)
                    progressed = True
                    steps += 1
                    if steps > cap:  # pragma: no cover - safety net
                        raise RuntimeError("canonicalization failed to converge")
        # slide the highest offending H down to its lowest neighbor
        for u in range(n - 1, -1, -1):
            if w.tags[u] >> 2 == 2:
                below = w.adj[u] & ((1 << u) - 1)
                if below:
                    _slide_h(w, u, (below & -below).bit_length() - 1)
                    steps += 1
                    if steps > cap:  # pragma: no cover - safety net
                        raise RuntimeError("canonicalization failed to converge")
                    break
        else:
            break
    # strip X parts off the remaining tags with the graph stabilizers
    for v in range(n):
        q = w.tags[v] & 3
        if q == 1:  # D X |G> = D Z_{N(v)} |G>
            w.tags[v] &= ~3
        elif q == 2:  # D Y = -i (D Z) X
            w.phase(6)
            w.tags[v] |= 3
        else:
            continue
        for u in _bits(w.adj[v]):
            w.rmul(u, TAG_Z)


def canonicalize(s: ExtendedGraphState) -> HkForm:
    """Rewrite into the unique canonical presentation of the same vector."""
    if s.canonical:
        return s
    w = _Work(s)
    _canonicalize_work(w)
    return w.freeze(canonical=True)


# ---------------------------------------------------------------------------
# controlled-Z


def _cz_zz(w: _Work, u: int, v: int) -> None:
    w.toggle(u, v)


def _cz_zx(w: _Work, u: int, v: int) -> None:
    for x in _bits(w.adj[v]):
        if x == u:
            w.rmul(u, TAG_Z)
        else:
            w.toggle(u, x)


def _cz_yz(w: _Work, u: int, v: int) -> None:
    mu = w.adj[u] | (1 << u)
    w.rmul(v, TAG_S)
    w.rmul(v, TAG_Z)
    for x in _bits(mu):
        if x == v:
            w.rmul(v, TAG_Z)
        else:
            w.toggle(v, x)


def _cz_xx(w: _Work, u: int, v: int) -> None:
    mu = w.adj[u] | (1 << u)
    mv = w.adj[v] | (1 << v)
    if (w.adj[u] >> v) & 1:
        w.rmul(u, TAG_H)
        w.rmul(v, TAG_H)
        w.toggle(u, v)
        # diagonal hits on common neighbors contribute a Z each; the two
        # endpoint self-pairs cancel against the explicit controlled-Z
        for x in _bits((mu & mv) & ~((1 << u) | (1 << v))):
            w.rmul(x, TAG_Z)
        w.pair_toggles(mu, mv)
    else:
        nu, nv = w.adj[u], w.adj[v]
        for x in _bits(nu & nv):
            w.rmul(x, TAG_Z)
        w.pair_toggles(nu, nv)


def _cz_yx(w: _Work, u: int, v: int) -> None:
    mu = w.adj[u] | (1 << u)
    if (w.adj[u] >> v) & 1:
        delta = mu ^ w.adj[v]
        w.phase(7)
        w.toggle_clique(w.adj[u])
        for x in _bits(mu):
            w.rmul(x, TAG_S)
        w.rmul(u, TAG_H)
        for x in _bits(delta):
            if x == u:
                w.rmul(u, TAG_Z)
            else:
                w.toggle(u, x)
    else:
        delta = mu ^ w.adj[v]
        for x in _bits(delta):
            w.rmul(x, TAG_Z)
        for x in _bits(delta):
            w.rmul(x, TAG_S)
        w.toggle_clique(delta)
        for x in _bits(mu):
            w.rmul(x, TAG_S)
        w.toggle_clique(mu)


def _cz_yy(w: _Work, u: int, v: int) -> None:
    mu = w.adj[u] | (1 << u)
    mv = w.adj[v] | (1 << v)
    if (w.adj[u] >> v) & 1:
        w.phase(6)
        for x in _bits(mu):
            w.rmul(x, TAG_S)
        w.toggle_clique(mu)
        for x in _bits(mv):
            w.rmul(x, TAG_S)
        w.toggle_clique(mv)
    else:
        w.phase(7)
        w.toggle_clique(w.adj[u])
        for x in _bits(mu):
            w.rmul(x, TAG_S)
        w.rmul(u, TAG_H)
        for x in _bits(mv):
            w.toggle(u, x)


_CZ_ROWS = {
    (3, 3): _cz_zz,
    (3, 1): _cz_zx,
    (2, 3): _cz_yz,
    (1, 1): _cz_xx,
    (2, 1): _cz_yx,
    (2, 2): _cz_yy,
}


def _cz_work(w: _Work, u: int, v: int) -> None:
    tu, p = CLIFFORD_CONJ_DAG[w.tags[u]][3]
    tv, q = CLIFFORD_CONJ_DAG[w.tags[v]][3]
    # sign corrections: flipping Q's sign costs P on u, flipping P's sign
    # costs Q on v, flipping both also flips the global sign; the correction
    # Pauli sits between the old tag and the table ops, hence rmul first
    if tv:
        w.rmul(u, p)
    if tu:
        w.rmul(v, q)
        if tv:
            w.phase(4)
    handler = _CZ_ROWS.get((p, q))
    if handler is not None:
        handler(w, u, v)
    else:
        _CZ_ROWS[(q, p)](w, v, u)


def apply_cz(s: ExtendedGraphState, u: int, v: int) -> ExtendedGraphState:
    """Apply a controlled-Z between u and v, dispatching on the conjugated
    Pauli letters that the two tags pull the controls to."""
    if u == v:
        raise ValueError("controlled-Z needs two distinct vertices")
    w = _Work(s)
    _cz_work(w, u, v)
    return w.freeze()


def apply_local(s: ExtendedGraphState, v: int, g: int | str) -> ExtendedGraphState:
    """Apply a single-qubit Clifford (tag index or H/S/X/Y/Z word) at v."""
    if isinstance(g, str):
        c, j = tag_of_word(g)
    else:
        c, j = g, 0
    w = _Work(s)
    w.phase(j)
    w.lmul(v, c)
    return w.freeze()


# ---------------------------------------------------------------------------
# projections, measurements


def _graph_stabilizer(w: _Work, v: int) -> PauliString:
    return PauliString(w.n, 1 << v, w.adj[v], 0)


def _project_work(w: _Work, p: PauliString, k: int) -> bool:
    """Send the state through (I + i^k p)/sqrt(2); False when it vanishes."""
    q = pauli_conjugate_layer(p, w.tags, dagger=True)
    while q.x:
        low = (q.x & -q.x).bit_length() - 1
        q = q * _graph_stabilizer(w, low)
    phi = (k + q.phase) % 4
    zset = q.z
    if zset == 0:
        if phi == 2:
            return False
        if phi == 0:
            w.scalar = w.scalar * Scalar8.sqrt2_pow(1)
        else:
            w.phase(1 if phi == 1 else 7)
        return True
    v = (zset & -zset).bit_length() - 1
    a = w.adj[v] | (1 << v)
    w.rmul(v, TAG_H)
    w.rmul(v, TAG_Z)
    if phi:
        g = (TAG_I, TAG_S, TAG_Z, TAG_SZ)[phi]
        for x in _bits(a):
            w.rmul(x, g)
        if phi & 1:
            w.toggle_clique(a)
    for x in _bits(a & zset):
        w.rmul(x, TAG_Z)
    w.pair_toggles(a, zset)
    return True


def project_pauli(
    s: ExtendedGraphState, zset: Iterable[int], k: int
) -> HkForm | None:
    """Apply (I + i^k * Z over zset)/sqrt(2); None when the state vanishes."""
    mask = 0
    for v in zset:
        if not 0 <= v < s.n:
            raise ValueError(f"vertex {v} out of range")
        mask |= 1 << v
    if mask == 0:
        raise ValueError("need a nonempty vertex set")
    return project_pauli_string(s, PauliString(s.n, 0, mask, 0), k)


def project_pauli_string(
    s: ExtendedGraphState, p: PauliString, k: int
) -> HkForm | None:
    """Apply (I + i^k p)/sqrt(2) for an arbitrary Pauli string p."""
    if p.n != s.n:
        raise ValueError("length mismatch")
    w = _Work(s)
    if not _project_work(w, p, k):
        return None
    _canonicalize_work(w)
    return w.freeze(canonical=True)


def measure_pauli(
    s: ExtendedGraphState, p: PauliString, outcome: int = 1
) -> tuple[HkForm, float] | None:
    """Measure a Hermitian Pauli; returns (post-state, probability) with the
    state renormalized, or None when the outcome has probability zero."""
    if p.n != s.n:
        raise ValueError("length mismatch")
    if not p.is_hermitian:
        raise ValueError("measurement operator must be Hermitian")
    if outcome not in (1, -1):
        raise ValueError("outcome must be +1 or -1")
    w = _Work(s)
    q = pauli_conjugate_layer(p, w.tags, dagger=True)
    while q.x:
        low = (q.x & -q.x).bit_length() - 1
        q = q * _graph_stabilizer(w, low)
    if q.z == 0:
        # the operator already acts as +/-1 on the state
        value = 1 if q.phase == 0 else -1
        if value == outcome:
            return canonicalize(s), 1.0
        return None
    if not _project_work(w, p, 0 if outcome == 1 else 2):
        return None  # unreachable: a nontrivial projector never annihilates
    _canonicalize_work(w)
    return w.freeze(canonical=True), 0.5


# ---------------------------------------------------------------------------
# inner product, support


def inner_product(s1: ExtendedGraphState, s2: ExtendedGraphState) -> Scalar8:
    """Exact <s1|s2>, global phase included."""
    if s1.n != s2.n:
        raise ValueError("states live on different qubit counts")
    n = s1.n
    w = _Work(s2)
    w.scalar = s1.scalar.conj() * s2.scalar
    for v in range(n):
        a, ja = CLIFFORD_ADJ[s1.tags[v]]
        w.phase(ja)
        w.lmul(v, a)
    for u in range(n):
        for v in _bits(s1.adj[u]):
            if u < v:
                _cz_work(w, u, v)
    for v in range(n):
        w.lmul(v, TAG_H)
    _canonicalize_work(w)
    # all-zeros amplitude of the canonical result: each H-tagged vertex
    # contributes a |0>, everything else a |+>; a residual Z under an H kills it
    h_count = 0
    for c in w.tags:
        if c >> 2 == 2:
            h_count += 1
            if c & 3:
                return Scalar8.zero()
    return w.scalar * Scalar8.sqrt2_pow(h_count - n)


def support(s: HkForm) -> int:
    """Number of nonzero computational-basis amplitudes of a canonical state."""
    if not s.canonical:
        raise ValueError("support is defined on canonical states")
    h_count = sum(1 for c in s.tags if c >> 2 == 2)
    return 1 << (s.n - h_count)
