"""Exact dense-vector reference implementations.

Amplitudes live in the ring generated by the eighth root of unity over the
integers, scaled by a shared power of sqrt(2): a state is an integer array
of shape (2**n, 4) plus one `hp` exponent, and entry x represents
``(a0 + a1 w + a2 w^2 + a3 w^3) * 2**(-hp/2)``.  All gate applications and
comparisons are exact; floating point appears only in `to_complex`.

These routines are deliberately simple and slow.  They are the ground truth
the graph-based algorithms are tested against, so they share no update
logic with those modules.
"""

from __future__ import annotations

from itertools import combinations
from typing import Callable, Iterable

import numpy as np

from .core import (
    CLIFFORD_MATS,
    PauliString,
    Scalar8,
    Tableau,
    gf2_in_span,
    gf2_solve,
    tableau_valid,
)

__all__ = [
    "DenseState",
    "dense_of",
    "graph_state_dense",
    "spider_diagram_dense",
    "apply_pauli_dense",
    "codespace_projector",
    "codespace_equal",
    "brute_distance",
    "enumerate_stab_states",
]

DENSE_LIMIT = 14


def _rot1(arr: np.ndarray) -> np.ndarray:
    """Multiply every amplitude by the primitive eighth root of unity."""
    out = np.empty_like(arr)
    out[..., 0] = -arr[..., 3]
    out[..., 1] = arr[..., 0]
    out[..., 2] = arr[..., 1]
    out[..., 3] = arr[..., 2]
    return out


def _rot(arr: np.ndarray, j: int) -> np.ndarray:
    j %= 8
    if j >= 4:
        arr = -arr
        j -= 4
    for _ in range(j):
        arr = _rot1(arr)
    return arr


def _combine(coeffs: tuple[int, int, int, int], arr: np.ndarray) -> np.ndarray:
    out = coeffs[0] * arr
    cur = arr
    for c in coeffs[1:]:
        cur = _rot1(cur)
        if c:
            out = out + c * cur
    return out


def _lift_arr(arr: np.ndarray, steps: int) -> np.ndarray:
    """Multiply the integer parts by sqrt(2)**steps (steps >= 0)."""
    for _ in range(steps):
        a0 = arr[..., 0].copy()
        a1 = arr[..., 1].copy()
        a2 = arr[..., 2].copy()
        a3 = arr[..., 3].copy()
        arr = np.stack([a1 - a3, a0 + a2, a1 + a3, a2 - a0], axis=-1)
    return arr


class DenseState:
    __slots__ = ("n", "amp", "hp")

    def __init__(self, n: int, amp: np.ndarray | None = None, hp: int = 0):
        if n > DENSE_LIMIT:
            raise ValueError(f"dense simulation capped at {DENSE_LIMIT} qubits")
        self.n = n
        if amp is None:
            amp = np.zeros((1 << n, 4), dtype=np.int64)
            amp[0, 0] = 1
        self.amp = amp
        self.hp = hp

    @staticmethod
    def plus(n: int) -> DenseState:
        amp = np.zeros((1 << n, 4), dtype=np.int64)
        amp[:, 0] = 1
        return DenseState(n, amp, n)

    def copy(self) -> DenseState:
        return DenseState(self.n, self.amp.copy(), self.hp)

    def is_zero(self) -> bool:
        return not self.amp.any()

    def reduced(self) -> DenseState:
        """Strip shared sqrt(2) content so equal states compare equal."""
        if self.is_zero():
            return DenseState(self.n, self.amp.copy(), 0)
        amp, hp = self.amp, self.hp
        while True:
            if ((amp[:, 0] - amp[:, 2]) % 2).any() or (
                (amp[:, 1] - amp[:, 3]) % 2
            ).any():
                break
            a0, a1, a2, a3 = amp[:, 0], amp[:, 1], amp[:, 2], amp[:, 3]
            amp = np.stack(
                [(a1 - a3) // 2, (a0 + a2) // 2, (a1 + a3) // 2, (a2 - a0) // 2],
                axis=-1,
            )
            hp -= 1
        return DenseState(self.n, amp, hp)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DenseState):
            return NotImplemented
        a, b = self.reduced(), other.reduced()
        return a.n == b.n and a.hp == b.hp and bool(np.array_equal(a.amp, b.amp))

    def __hash__(self):  # pragma: no cover - dense states are not dict keys
        raise TypeError("unhashable")

    def proportional(self, other: DenseState) -> bool:
        """True when the two vectors differ only by a nonzero scalar."""
        if self.n != other.n:
            return False
        if self.is_zero() or other.is_zero():
            return self.is_zero() and other.is_zero()
        # cross-multiply against the first nonzero amplitude of each side
        i = int(np.flatnonzero(self.amp.any(axis=1))[0])
        j = int(np.flatnonzero(other.amp.any(axis=1))[0])
        if i != j:
            return False
        ca = tuple(int(v) for v in self.amp[i])
        cb = tuple(int(v) for v in other.amp[i])
        return bool(np.array_equal(_combine(cb, self.amp), _combine(ca, other.amp)))

    def scaled(self, s: Scalar8) -> DenseState:
        coeffs = (s.a0, s.a1, s.a2, s.a3)
        return DenseState(self.n, _combine(coeffs, self.amp), self.hp + s.hp)

    def add(self, other: DenseState) -> DenseState:
        if self.n != other.n:
            raise ValueError("length mismatch")
        hp = max(self.hp, other.hp)
        a = _lift_arr(self.amp, hp - self.hp)
        b = _lift_arr(other.amp, hp - other.hp)
        return DenseState(self.n, a + b, hp)

    def to_complex(self) -> np.ndarray:
        w = np.exp(1j * np.pi / 4)
        powers = np.array([1, w, w ** 2, w ** 3])
        return (self.amp @ powers) * 2.0 ** (-self.hp / 2)

    # -- gates

    def apply_matrix(self, mat, v: int) -> None:
        """Apply a row-major (m00, m01, m10, m11) Scalar8 matrix to qubit v."""
        entries = list(mat)
        top = max(e.hp for e in entries if not e.is_zero)
        cs = [e._lift(top - e.hp) if not e.is_zero else (0, 0, 0, 0) for e in entries]
        idx = np.arange(1 << self.n)
        lo = idx[(idx >> v) & 1 == 0]
        hi = lo | (1 << v)
        a0, a1 = self.amp[lo], self.amp[hi]
        self.amp[lo] = _combine(cs[0], a0) + _combine(cs[1], a1)
        self.amp[hi] = _combine(cs[2], a0) + _combine(cs[3], a1)
        self.hp += top

    def phase_rows(self, mask_condition: np.ndarray, j: int) -> None:
        """Multiply the selected rows by the j-th power of the eighth root."""
        self.amp[mask_condition] = _rot(self.amp[mask_condition], j)

    def apply_gate(self, name: str, qubits: tuple[int, ...]) -> None:
        _GATES[name.upper()](self, *qubits)


def _idx(n: int) -> np.ndarray:
    return np.arange(1 << n)


def _g_phase_if(d: DenseState, bitmask: int, j: int) -> None:
    idx = _idx(d.n)
    d.phase_rows((idx & bitmask) == bitmask, j)


def _g_x(d: DenseState, v: int) -> None:
    d.amp = d.amp[_idx(d.n) ^ (1 << v)]


def _g_y(d: DenseState, v: int) -> None:
    apply_pauli_dense(d, PauliString.single(d.n, v, "Y"))


def _g_h(d: DenseState, v: int) -> None:
    d.apply_matrix(CLIFFORD_MATS[8], v)


def _g_s(d: DenseState, v: int) -> None:
    _g_phase_if(d, 1 << v, 2)


def _g_sdg(d: DenseState, v: int) -> None:
    _g_phase_if(d, 1 << v, 6)


def _g_t(d: DenseState, v: int) -> None:
    _g_phase_if(d, 1 << v, 1)


def _g_tdg(d: DenseState, v: int) -> None:
    _g_phase_if(d, 1 << v, 7)


def _g_cx(d: DenseState, c: int, t: int) -> None:
    idx = _idx(d.n)
    d.amp = d.amp[idx ^ (((idx >> c) & 1) << t)]


def _g_swap(d: DenseState, a: int, b: int) -> None:
    idx = _idx(d.n)
    bits = ((idx >> a) ^ (idx >> b)) & 1
    d.amp = d.amp[idx ^ (bits << a) ^ (bits << b)]


def _g_cswap(d: DenseState, c: int, a: int, b: int) -> None:
    idx = _idx(d.n)
    bits = ((idx >> a) ^ (idx >> b)) & 1 & (idx >> c)
    d.amp = d.amp[idx ^ (bits << a) ^ (bits << b)]


def _g_ccx(d: DenseState, c1: int, c2: int, t: int) -> None:
    idx = _idx(d.n)
    d.amp = d.amp[idx ^ ((((idx >> c1) & (idx >> c2)) & 1) << t)]


def _g_ch(d: DenseState, c: int, t: int) -> None:
    idx = _idx(d.n)
    ctrl = (idx >> c) & 1 == 1
    lo = idx[ctrl & ((idx >> t) & 1 == 0)]
    hi = lo | (1 << t)
    a0, a1 = d.amp[lo].copy(), d.amp[hi].copy()
    d.amp = _lift_arr(d.amp, 1)
    d.amp[lo] = a0 + a1
    d.amp[hi] = a0 - a1
    d.hp += 1


_GATES: dict[str, Callable] = {
    "I": lambda d, *q: None,
    "X": _g_x,
    "Y": _g_y,
    "Z": lambda d, v: _g_phase_if(d, 1 << v, 4),
    "H": _g_h,
    "S": _g_s,
    "SDG": _g_sdg,
    "T": _g_t,
    "TDG": _g_tdg,
    "CZ": lambda d, u, v: _g_phase_if(d, (1 << u) | (1 << v), 4),
    "CS": lambda d, u, v: _g_phase_if(d, (1 << u) | (1 << v), 2),
    "CSDG": lambda d, u, v: _g_phase_if(d, (1 << u) | (1 << v), 6),
    "CX": _g_cx,
    "CH": _g_ch,
    "SWAP": _g_swap,
    "CCZ": lambda d, u, v, w: _g_phase_if(d, (1 << u) | (1 << v) | (1 << w), 4),
    "CCX": _g_ccx,
    "CSWAP": _g_cswap,
}


def apply_pauli_dense(d: DenseState, p: PauliString) -> None:
    """In-place P|psi> with P's own phase convention kept exactly."""
    if p.n != d.n:
        raise ValueError("length mismatch")
    idx = _idx(d.n)
    signs = np.bitwise_count(idx & np.int64(p.z)) & 1
    amp = d.amp.copy()
    amp[signs == 1] = -amp[signs == 1]
    d.amp = _rot(amp, 2 * p.phase)[idx ^ p.x]


# ---------------------------------------------------------------------------
# building dense states


def graph_state_dense(s) -> DenseState:
    d = DenseState.plus(s.n)
    idx = _idx(s.n)
    for u in range(s.n):
        nbrs = s.adj[u] & ~((1 << (u + 1)) - 1)
        while nbrs:
            low = nbrs & -nbrs
            _g_phase_if(d, (1 << u) | low, 4)
            nbrs ^= low
    for v in range(s.n):
        if s.tags[v] != 0:
            d.apply_matrix(CLIFFORD_MATS[s.tags[v]], v)
    return d.scaled(s.scalar)


def dense_of(x) -> DenseState:
    """Dense vector of an extended graph state or a stabilizer-state sum."""
    terms = getattr(x, "terms", None)
    if terms is not None:
        out = DenseState(x.n, np.zeros((1 << x.n, 4), dtype=np.int64), 0)
        for coeff, state in terms:
            out = out.add(graph_state_dense(state).scaled(coeff))
        return out
    return graph_state_dense(x)


def spider_diagram_dense(d) -> DenseState:
    """Exact contraction of a small fused spider diagram.

    Wires are ordered outputs first (bits 0..n-1), then inputs
    (bits n..n+k-1). Nodes sum over {0,1} with their quarter-turn
    phases; plain edges force agreement, Hadamard boxes contribute a
    sign and one half power of two each. The result is the raw diagram
    tensor, unnormalized, so compare images or use `proportional`.
    """
    nw = d.n + d.k
    if nw > DENSE_LIMIT or len(d.nodes) > DENSE_LIMIT:
        raise ValueError(f"dense contraction capped at {DENSE_LIMIT} legs")
    pos = {v: i for i, v in enumerate(d.nodes)}
    hp = sum(1 for e in d.internal if e[2]) + sum(1 for f in d.free if f[3])
    amp = np.zeros((1 << nw, 4), dtype=np.int64)
    for assign in range(1 << len(d.nodes)):
        quarter = 0
        ok = True
        for j, ph in enumerate(d.phases):
            if assign >> j & 1:
                quarter += ph
        for u, v, h in d.internal:
            bu = assign >> pos[u] & 1
            bv = assign >> pos[v] & 1
            if h:
                quarter += 2 * (bu & bv)
            elif bu != bv:
                ok = False
                break
        if not ok:
            continue
        base = 0
        hlegs = []
        for node, kind, wire, h in d.free:
            b = assign >> pos[node] & 1
            bit = wire if kind == "out" else d.n + wire
            if h:
                hlegs.append((bit, b))
            elif b:
                base |= 1 << bit
        for combo in range(1 << len(hlegs)):
            q = quarter
            word = base
            for t, (bit, b) in enumerate(hlegs):
                x = combo >> t & 1
                q += 2 * (b & x)
                if x:
                    word |= 1 << bit
            q %= 4
            if q < 2:
                amp[word, 2 * q] += 1
            else:
                amp[word, 2 * (q - 2)] -= 1
    return DenseState(nw, amp, hp)


# ---------------------------------------------------------------------------
# codes


def codespace_projector(t: Tableau) -> Callable[[DenseState], DenseState]:
    """The map |psi> -> prod_i (I + S_i)/2 |psi>, exact."""

    def apply(d: DenseState) -> DenseState:
        out = d.copy()
        for row in t.rows:
            mirrored = out.copy()
            apply_pauli_dense(mirrored, row)
            out = out.add(mirrored)
            out.hp += 2
        return out

    return apply


def codespace_equal(t1: Tableau, t2: Tableau) -> bool:
    """Whether two tableaus generate the same stabilizer group, signs included."""
    if not (tableau_valid(t1) and tableau_valid(t2)):
        raise ValueError("codespace comparison requires valid tableaus")
    if t1.n != t2.n or len(t1.rows) != len(t2.rows):
        return False
    n = t1.n
    vecs = [r.x | (r.z << n) for r in t1.rows]
    for q in t2.rows:
        combo = gf2_solve(vecs, q.x | (q.z << n), 2 * n)
        if combo is None:
            return False
        prod = PauliString.identity(n)
        for i in range(len(vecs)):
            if (combo >> i) & 1:
                prod = prod * t1.rows[i]
        if prod != q:
            return False
    return True


def brute_distance(t: Tableau, cap: int | None = None) -> int | None:
    """Minimum weight of a Pauli that commutes with every stabilizer but is
    not itself in the stabilizer group; None when nothing is found below cap."""
    if t.k == 0:
        raise ValueError("distance needs at least one logical qubit")
    n = t.n
    if n > 64:
        raise ValueError("brute-force search capped at 64 qubits")
    rows = t.rows
    rx = np.array([r.x for r in rows], dtype=np.uint64)
    rz = np.array([r.z for r in rows], dtype=np.uint64)
    span_rows = [r.x | (r.z << n) for r in rows]
    limit = cap if cap is not None else n
    for w in range(1, limit + 1):
        pow3 = 3 ** w
        digits = np.arange(pow3)
        for supp in combinations(range(n), w):
            cx = np.zeros(pow3, dtype=np.uint64)
            cz = np.zeros(pow3, dtype=np.uint64)
            rem = digits
            for pos in supp:
                dig = rem % 3
                rem = rem // 3
                cx |= ((dig <= 1).astype(np.uint64)) << np.uint64(pos)
                cz |= ((dig >= 1).astype(np.uint64)) << np.uint64(pos)
            ok = np.ones(pow3, dtype=bool)
            for i in range(len(rows)):
                par = (
                    np.bitwise_count(cx & rz[i]) ^ np.bitwise_count(cz & rx[i])
                ) & np.uint64(1)
                ok &= par == 0
            if not ok.any():
                continue
            for j in np.flatnonzero(ok):
                vec = int(cx[j]) | (int(cz[j]) << n)
                if not gf2_in_span(span_rows, vec, 2 * n):
                    return w
    return None


# ---------------------------------------------------------------------------
# state enumeration


def enumerate_stab_states(n: int):
    """All canonical extended graph states on n <= 3 vertices."""
    from .graphstate import ExtendedGraphState

    if not 1 <= n <= 3:
        raise ValueError("enumeration supported for 1 <= n <= 3")
    pairs = list(combinations(range(n), 2))
    canon = (0, 3, 4, 7, 8, 11)
    out = []
    for gmask in range(1 << len(pairs)):
        edges = [pairs[i] for i in range(len(pairs)) if (gmask >> i) & 1]
        adj = [0] * n
        for u, v in edges:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        choices = [[]]
        for v in range(n):
            allowed = [
                c
                for c in canon
                if not (c >> 2 == 2 and adj[v] & ((1 << v) - 1))
            ]
            choices = [prev + [c] for prev in choices for c in allowed]
        for tags in choices:
            out.append(
                ExtendedGraphState(
                    n, edges, {v: c for v, c in enumerate(tags)}, canonical=True
                )
            )
    return out
