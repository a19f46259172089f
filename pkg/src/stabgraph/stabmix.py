"""Linear combinations of extended graph states and non-Clifford gates.

Clifford gates keep a stabilizer state in one piece; the supported C3 gates
(T, CS, CH, CCZ, CCX, CSWAP) do not.  Each of them factors into at most two
Clifford-dressed Pauli projections, so applying one to a sum at most doubles
the term count.  ``StabilizerSum`` stores such sums with every term canonical
and every coefficient exact, ``apply_c3`` performs the split, and ``reduce``
fights rank growth by recombining any two terms whose weighted sum is again
a single stabilizer state.

Merge detection runs in the frame where the first term of a pair becomes the
all-zeros basis state: rotating the second term there turns every mergeable
configuration into an exact amplitude-ratio test on a support-1, -2 or -4
state, with no floating point anywhere.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .core import (
    CLIFFORD_ADJ,
    CLIFFORD_CONJ,
    PauliString,
    Scalar8,
    TAG_H,
    TAG_I,
    TAG_S,
    TAG_SZ,
    TAG_Z,
)
from .graphstate import (
    ExtendedGraphState,
    HkForm,
    _canonicalize_work,
    _cz_work,
    _Work,
    apply_cz,
    apply_local,
    canonicalize,
    inner_product,
    project_pauli,
    project_pauli_string,
    support,
)

__all__ = ["StabilizerSum", "apply_c3", "apply_clifford", "reduce", "try_merge_pair"]

_ZERO = Scalar8.zero()
_ONE = Scalar8.one()
_TWO = Scalar8.of_int(2)
_OMEGA = Scalar8.omega_pow(1)
_SQRT2 = Scalar8.sqrt2_pow(1)
_RT_HALF = Scalar8.sqrt2_pow(-1)
_I_POW = tuple(Scalar8.i_pow(k) for k in range(4))
# S^k tags: diag(1, i^k) is exactly I, S, Z, S.Z for k = 0..3
_S_POW = (TAG_I, TAG_S, TAG_Z, TAG_SZ)


def _split(s: HkForm) -> tuple[Scalar8, HkForm]:
    """Factor a canonical state into (scalar, same state with scalar one)."""
    if s.scalar == _ONE:
        return _ONE, s
    w = _Work(s)
    w.scalar = _ONE
    return s.scalar, w.freeze(canonical=True)


# ---------------------------------------------------------------------------
# the sum container


class StabilizerSum:
    """An exact linear combination of canonical extended graph states.

    Terms are (Scalar8 coefficient, state) pairs; the constructor
    canonicalizes states, folds their scalars into the coefficients, adds
    coefficients of equal states, drops zero terms and sorts by state key,
    so equal vectors built along different routes compare equal termwise.
    The empty sum represents the zero vector.
    """

    __slots__ = ("n", "terms")

    def __init__(
        self,
        n: int,
        terms: Iterable[tuple[Scalar8, ExtendedGraphState]] = (),
    ):
        acc: dict[tuple, tuple[Scalar8, HkForm]] = {}
        for coeff, state in terms:
            if state.n != n:
                raise ValueError("term qubit count mismatch")
            if not state.canonical:
                state = canonicalize(state)
            sc, stripped = _split(state)
            coeff = coeff * sc
            key = stripped.key()
            prev = acc.get(key)
            if prev is None:
                acc[key] = (coeff, stripped)
            else:
                acc[key] = (prev[0] + coeff, prev[1])
        kept = [(c, s) for c, s in acc.values() if not c.is_zero]
        kept.sort(key=lambda t: t[1].key())
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "terms", tuple(kept))

    def __setattr__(self, name, value):
        raise AttributeError("StabilizerSum is immutable")

    @staticmethod
    def of_state(state: ExtendedGraphState, coeff: Scalar8 | None = None) -> StabilizerSum:
        return StabilizerSum(state.n, [(coeff if coeff is not None else _ONE, state)])

    @property
    def rank(self) -> int:
        return len(self.terms)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StabilizerSum):
            return NotImplemented
        return self.n == other.n and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.n, self.terms))

    def __repr__(self) -> str:
        return f"StabilizerSum(n={self.n}, rank={len(self.terms)})"

    def to_json_dict(self) -> dict:
        recs = []
        for c, s in self.terms:
            recs.append(
                {
                    "coefficient": {"a": [c.a0, c.a1, c.a2, c.a3], "halfpow": c.hp},
                    "state": s.to_json_dict(),
                }
            )
        return {"n": self.n, "terms": recs}

    @staticmethod
    def from_json_dict(data: Mapping) -> StabilizerSum:
        terms = []
        for rec in data.get("terms", []):
            co = rec["coefficient"]
            terms.append(
                (
                    Scalar8(*co["a"], hp=co["halfpow"]),
                    ExtendedGraphState.from_json_dict(rec["state"]),
                )
            )
        return StabilizerSum(int(data["n"]), terms)


# ---------------------------------------------------------------------------
# gate application

_C3_ARITY = {"T": 1, "CS": 2, "CH": 2, "CCZ": 3, "CCX": 3, "CSWAP": 3}


def _push(out: list, coeff: Scalar8, state: HkForm | None) -> None:
    if state is not None:
        out.append((coeff, state))


def _c3_projections(name: str, qs: Sequence[int], n: int) -> tuple[PauliString, ...]:
    # rightmost factor of the operator product first
    if name == "CCZ":
        u, v, w = qs
        return (
            PauliString.single(n, w, "Z"),
            PauliString.single(n, v, "Z"),
            PauliString.single(n, u, "Z"),
        )
    if name == "CCX":
        u, v, w = qs
        return (
            PauliString.single(n, w, "X"),
            PauliString.single(n, v, "Z"),
            PauliString.single(n, u, "Z"),
        )
    u, a, b = qs
    return (
        PauliString.single(n, a, "X") * PauliString.single(n, b, "X"),
        PauliString.single(n, a, "Z") * PauliString.single(n, b, "Z"),
        PauliString.single(n, u, "Z"),
    )


def apply_c3(s: StabilizerSum, gate: str, qubits: Sequence[int]) -> StabilizerSum:
    """Apply one supported non-Clifford gate to the sum.

    Gates and qubit order: ``T`` (v); ``CS`` / ``CH`` (control, target);
    ``CCZ`` (u, v, w); ``CCX`` (control, control, target); ``CSWAP``
    (control, a, b).  Each diagonal-plus-correction decomposition is applied
    per term:

    * ``T = (I+Z)/2 + w (I-Z)/2`` with w = exp(i pi/4), two terms;
    * ``CS/CH = (I+Z_c)/2 + (I-Z_c)/2 . {S,H}_t``, two terms;
    * ``CCZ/CCX/CSWAP = identity - (1/4)(product of three sign projectors)``,
      an identity term plus one projection chain.

    Projections that annihilate a term drop it; the constructor then merges
    equal states, so the returned rank is at most twice the input rank.
    """
    name = gate.upper()
    arity = _C3_ARITY.get(name)
    if arity is None:
        raise ValueError(f"unsupported gate {gate!r}")
    qs = tuple(qubits)
    if len(qs) != arity or len(set(qs)) != arity:
        raise ValueError(f"{name} takes {arity} distinct qubits")
    for v in qs:
        if not 0 <= v < s.n:
            raise ValueError(f"qubit {v} out of range")
    out: list[tuple[Scalar8, HkForm]] = []
    for c, st in s.terms:
        if name == "T":
            (v,) = qs
            _push(out, c * _RT_HALF, project_pauli(st, (v,), 0))
            _push(out, c * _RT_HALF * _OMEGA, project_pauli(st, (v,), 2))
        elif name in ("CS", "CH"):
            u, v = qs
            _push(out, c * _RT_HALF, project_pauli(st, (u,), 0))
            t = project_pauli(st, (u,), 2)
            if t is not None:
                dressed = apply_local(t, v, TAG_S if name == "CS" else TAG_H)
                out.append((c * _RT_HALF, dressed))
        else:
            out.append((c, st))
            t: HkForm | None = st
            for p in _c3_projections(name, qs, s.n):
                t = project_pauli_string(t, p, 2)
                if t is None:
                    break
            if t is not None:
                out.append((-(c * _RT_HALF), t))
    return StabilizerSum(s.n, out)


def apply_clifford(s: StabilizerSum, gate: str, qubits: Sequence[int]) -> StabilizerSum:
    """Apply a Clifford gate to every term: a single-qubit word made of
    H/S/X/Y/Z letters, or two-qubit ``CZ`` / ``CX`` (control, target)."""
    name = gate.upper()
    out = []
    for c, st in s.terms:
        if name == "CZ":
            u, v = qubits
            t = apply_cz(st, u, v)
        elif name == "CX":
            ctrl, tgt = qubits
            t = apply_local(st, tgt, TAG_H)
            t = apply_cz(t, ctrl, tgt)
            t = apply_local(t, tgt, TAG_H)
        else:
            (v,) = qubits
            t = apply_local(st, v, name)
        out.append((c, t))
    return StabilizerSum(s.n, out)


# ---------------------------------------------------------------------------
# pairwise merging

# a pair of distinct canonical terms a|V1> + b|V2> merges exactly when one of
# these holds, and the frame trick below decides all of them exactly:
#   * |V2> is a phased Pauli times |V1>, and b/a is a matching power of i
#     (the sum is then a Pauli projection of |V1>);
#   * in the frame where |V1> is the all-zeros state, |V2> has support 2
#     containing zero and the amplitude pair matches some diag(1, i^k), the
#     sum then being S_v^k-related to |V2> or a basis state;
#   * in that frame |V2> has support 4 containing zero and the sum equals
#     Z_u Z_v CZ_uv |V2>.
# support 1 is the Pauli case again, support 8 and up never merges, nor does
# any in-frame support set missing the all-zeros string.


def _pauli_related(v1: HkForm, v2: HkForm) -> PauliString | None:
    """The exact Pauli Q with |v2> = Q|v1>, or None if there is none.

    Stripped canonical states are Pauli-related precisely when their graphs
    match and their tags agree up to trailing Z factors: within each diagonal
    class the two canonical tags differ by exactly M -> M.Z, and pushing the
    Z through M turns it into the conjugated Pauli i^t P at that vertex.
    """
    if v1.adj != v2.adj:
        return None
    q = PauliString.identity(v1.n)
    for v in range(v1.n):
        t1, t2 = v1.tags[v], v2.tags[v]
        if t1 == t2:
            continue
        if (t1 >> 2) != (t2 >> 2):
            return None
        ph, letter = CLIFFORD_CONJ[t1][3]
        q = q * PauliString.single(v1.n, v, "IXYZ"[letter]).mul_i_pow(ph)
    return q


def _zero_basis(n: int) -> HkForm:
    return ExtendedGraphState(n, (), {v: TAG_H for v in range(n)}, None, canonical=True)


def _to_frame(base: HkForm, other: ExtendedGraphState) -> HkForm:
    """Rotate `other` by the inverse of the circuit preparing `base`.

    A stripped canonical `base` equals (tags)(CZ edges)(H layer)|0..0>, so
    applying the adjoint layers in reverse order sends `base` to the
    all-zeros state and `other` wherever it must go.
    """
    w = _Work(other)
    for v in range(base.n):
        c, j = CLIFFORD_ADJ[base.tags[v]]
        w.phase(j)
        w.lmul(v, c)
    for u, v in base.edges():
        _cz_work(w, u, v)
    for v in range(base.n):
        w.lmul(v, TAG_H)
    _canonicalize_work(w)
    return w.freeze(canonical=True)


def _from_frame(base: HkForm, state: HkForm) -> HkForm:
    w = _Work(state)
    for v in range(base.n):
        w.lmul(v, TAG_H)
    for u, v in base.edges():
        _cz_work(w, u, v)
    for v in range(base.n):
        w.lmul(v, base.tags[v])
    _canonicalize_work(w)
    return w.freeze(canonical=True)


def try_merge_pair(
    c1: Scalar8,
    s1: ExtendedGraphState,
    c2: Scalar8,
    s2: ExtendedGraphState,
) -> tuple[Scalar8, HkForm] | None:
    """If c1|s1> + c2|s2> is itself a stabilizer state, return it as a
    (coefficient, canonical state) pair with the state's scalar folded into
    the coefficient; otherwise None.  The zero vector comes back as a zero
    coefficient on s1 when the terms cancel outright.

    Every test is exact: the cheap route checks whether the states differ by
    a Pauli and the coefficient ratio is a power of i; the general route
    rotates s2 into the frame where s1 is the all-zeros state and classifies
    the rotated support (2 or 4, containing the all-zeros string) by
    amplitude ratios, covering the S_v^k and Z Z CZ recombinations.  Inverses
    of the unit-modulus inner products involved are taken by conjugation, so
    no division is ever performed.
    """
    if s1.n != s2.n:
        raise ValueError("qubit count mismatch")
    if not s1.canonical:
        s1 = canonicalize(s1)
    if not s2.canonical:
        s2 = canonicalize(s2)
    sc1, w1 = _split(s1)
    sc2, w2 = _split(s2)
    a = c1 * sc1
    b = c2 * sc2
    if a.is_zero:
        return b, w2
    if b.is_zero:
        return a, w1
    if w1.key() == w2.key():
        return a + b, w1

    q = _pauli_related(w1, w2)
    if q is not None:
        for k in range(4):
            if b == a * _I_POW[k]:
                # a(I + i^k Q)|w1>; distinct keys rule out annihilation
                merged = project_pauli_string(w1, q, k)
                sc, merged = _split(merged)
                return a * _SQRT2 * sc, merged
        return None

    psi = _to_frame(w1, w2)
    sc, psi = _split(psi)
    b = b * sc
    sup = support(psi)
    if sup == 1:
        # a basis state here would mean the pair was Pauli-related
        return None
    c0 = inner_product(_zero_basis(psi.n), psi)
    if c0.is_zero or sup > 4:
        return None
    if sup == 2:
        # sum = diag(alpha0, alpha1) psi on the one free coordinate v
        v = next(u for u in range(psi.n) if psi.tags[u] >> 2 != 2)
        alpha0 = a * c0.conj() * _TWO + b
        alpha1 = b
        if alpha0.is_zero:
            merged = project_pauli(psi, (v,), 2)
            coeff = alpha1 * _RT_HALF
        else:
            for k in (1, 2, 3):
                if alpha1 == alpha0 * _I_POW[k]:
                    merged = canonicalize(apply_local(psi, v, _S_POW[k]))
                    coeff = alpha0
                    break
            else:
                return None
    else:
        # sum = (2a conj(c0) + b) psi + 2a conj(c0) Z_u Z_v CZ_uv psi;
        # only the vanishing first coefficient yields a stabilizer state
        coeff = a * c0.conj() * _TWO
        if b != -coeff:
            return None
        free = [u for u in range(psi.n) if psi.tags[u] >> 2 != 2]
        u, v = free
        t = apply_cz(psi, u, v)
        t = apply_local(t, u, TAG_Z)
        merged = canonicalize(apply_local(t, v, TAG_Z))
    sc, merged = _split(merged)
    coeff = coeff * sc
    out = _from_frame(w1, merged)
    sc, out = _split(out)
    return coeff * sc, out


def reduce(s: StabilizerSum) -> StabilizerSum:
    """Merge term pairs until no pair sums to a single stabilizer state.

    The scan is lexicographic over the key-sorted term list and restarts
    after every successful merge, so the result is deterministic.  The
    represented vector never changes; the term count never grows.
    """
    cur = s
    merged = True
    while merged:
        merged = False
        terms = cur.terms
        for i in range(len(terms)):
            for j in range(i + 1, len(terms)):
                got = try_merge_pair(terms[i][0], terms[i][1], terms[j][0], terms[j][1])
                if got is None:
                    continue
                rest = [terms[x] for x in range(len(terms)) if x != i and x != j]
                rest.append(got)
                cur = StabilizerSum(s.n, rest)
                merged = True
                break
            if merged:
                break
    return cur
