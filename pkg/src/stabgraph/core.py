"""Exact arithmetic, single-qubit Clifford tables, Pauli strings, tableaus.

Everything downstream builds on four primitives defined here:

* ``Scalar8``: the ring Z[omega] with omega = exp(i*pi/4), extended by powers
  of 1/sqrt(2).  All amplitudes and global phases in the package live in this
  ring, so state equality is exact integer comparison.
* the 24 single-qubit Cliffords, indexed 0..23, with product / adjoint /
  Pauli-conjugation tables built once at import from exact 2x2 matrices.
* ``PauliString``: phase-tracked n-qubit Pauli operators on packed bits.
* ``Tableau``: a list of independent commuting Hermitian Pauli strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence


# ---------------------------------------------------------------------------
# Scalar8: a0 + a1*w + a2*w^2 + a3*w^3 times 2^(-hp/2), w = exp(i*pi/4)


def _reduce(a0: int, a1: int, a2: int, a3: int, hp: int) -> tuple[int, int, int, int, int]:
    if a0 == a1 == a2 == a3 == 0:
        return 0, 0, 0, 0, 0
    # dividing the integer part by sqrt2 multiplies the value by 2^(1/2),
    # compensated by hp -> hp - 1
    while (a0 - a2) % 2 == 0 and (a1 - a3) % 2 == 0:
        a0, a1, a2, a3, hp = (
            (a1 - a3) // 2,
            (a0 + a2) // 2,
            (a1 + a3) // 2,
            (a2 - a0) // 2,
            hp - 1,
        )
    return a0, a1, a2, a3, hp


class Scalar8:
    """Element of Z[omega] * 2^(-hp/2), kept in a unique reduced form."""

    __slots__ = ("a0", "a1", "a2", "a3", "hp")

    def __init__(self, a0: int, a1: int = 0, a2: int = 0, a3: int = 0, hp: int = 0):
        a0, a1, a2, a3, hp = _reduce(a0, a1, a2, a3, hp)
        object.__setattr__(self, "a0", a0)
        object.__setattr__(self, "a1", a1)
        object.__setattr__(self, "a2", a2)
        object.__setattr__(self, "a3", a3)
        object.__setattr__(self, "hp", hp)

    def __setattr__(self, name, value):
        raise AttributeError("Scalar8 is immutable")

    # -- constructors

    @staticmethod
    def zero() -> Scalar8:
        return _ZERO

    @staticmethod
    def one() -> Scalar8:
        return _ONE

    @staticmethod
    def omega_pow(j: int) -> Scalar8:
        return _OMEGA_POW[j % 8]

    @staticmethod
    def i_pow(k: int) -> Scalar8:
        return _OMEGA_POW[(2 * k) % 8]

    @staticmethod
    def sqrt2_pow(m: int) -> Scalar8:
        """2^(m/2); m may be negative."""
        return Scalar8(1, 0, 0, 0, -m)

    @staticmethod
    def of_int(v: int) -> Scalar8:
        return Scalar8(v)

    # -- ring operations

    def __add__(self, other: Scalar8) -> Scalar8:
        h = max(self.hp, other.hp)
        x = self._lift(h - self.hp)
        y = other._lift(h - other.hp)
        return Scalar8(x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3], h)

    def __sub__(self, other: Scalar8) -> Scalar8:
        return self + (-other)

    def __neg__(self) -> Scalar8:
        return Scalar8(-self.a0, -self.a1, -self.a2, -self.a3, self.hp)

    def __mul__(self, other: Scalar8) -> Scalar8:
        a = (self.a0, self.a1, self.a2, self.a3)
        b = (other.a0, other.a1, other.a2, other.a3)
        c = [0, 0, 0, 0]
        for i in range(4):
            if a[i] == 0:
                continue
            for j in range(4):
                k = i + j
                if k < 4:
                    c[k] += a[i] * b[j]
                else:
                    c[k - 4] -= a[i] * b[j]  # w^4 = -1
        return Scalar8(c[0], c[1], c[2], c[3], self.hp + other.hp)

    def conj(self) -> Scalar8:
        return Scalar8(self.a0, -self.a3, -self.a2, -self.a1, self.hp)

    def _lift(self, m: int) -> tuple[int, int, int, int]:
        """Multiply the integer part by sqrt2^m, m >= 0."""
        a0, a1, a2, a3 = self.a0, self.a1, self.a2, self.a3
        for _ in range(m):
            a0, a1, a2, a3 = a1 - a3, a0 + a2, a1 + a3, a2 - a0
        return a0, a1, a2, a3

    # -- predicates and views

    @property
    def is_zero(self) -> bool:
        return self.a0 == 0 and self.a1 == 0 and self.a2 == 0 and self.a3 == 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Scalar8):
            return NotImplemented
        return (
            self.a0 == other.a0
            and self.a1 == other.a1
            and self.a2 == other.a2
            and self.a3 == other.a3
            and self.hp == other.hp
        )

    def __hash__(self) -> int:
        return hash((self.a0, self.a1, self.a2, self.a3, self.hp))

    def to_complex(self) -> complex:
        w = complex(2 ** -0.5, 2 ** -0.5)
        v = self.a0 + self.a1 * w + self.a2 * w ** 2 + self.a3 * w ** 3
        return v * 2.0 ** (-self.hp / 2)

    def abs_sq(self) -> Scalar8:
        return self * self.conj()

    def __repr__(self) -> str:
        return f"Scalar8({self.a0},{self.a1},{self.a2},{self.a3},hp={self.hp})"


_ZERO = Scalar8(0)
_ONE = Scalar8(1)
_OMEGA_POW = [
    Scalar8(1),
    Scalar8(0, 1),
    Scalar8(0, 0, 1),
    Scalar8(0, 0, 0, 1),
    Scalar8(-1),
    Scalar8(0, -1),
    Scalar8(0, 0, -1),
    Scalar8(0, 0, 0, -1),
]


# ---------------------------------------------------------------------------
# The 24 single-qubit Cliffords.
#
# Index c = 4*d + p encodes the canonical matrix M_c = D_d * P_p with
# D in (I, S, H, HS, SH, HSH) and P in (I, X, Y, Z).  The matrix group
# generated by H and S has order 192 = 24 * 8, the quotient being the
# global phases w^j, so every product of canonical matrices is w^j * M_c
# for a unique pair (c, j).

_Mat = tuple[Scalar8, Scalar8, Scalar8, Scalar8]


def _mmul(x: _Mat, y: _Mat) -> _Mat:
    return (
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    )


def _mdag(x: _Mat) -> _Mat:
    return (x[0].conj(), x[2].conj(), x[1].conj(), x[3].conj())


def _mscale(s: Scalar8, x: _Mat) -> _Mat:
    return (s * x[0], s * x[1], s * x[2], s * x[3])


def _mkey(x: _Mat):
    return tuple((e.a0, e.a1, e.a2, e.a3, e.hp) for e in x)


_i = Scalar8.i_pow(1)
_r = Scalar8.sqrt2_pow(-1)  # 1/sqrt2
_MAT_I: _Mat = (_ONE, _ZERO, _ZERO, _ONE)
_MAT_X: _Mat = (_ZERO, _ONE, _ONE, _ZERO)
_MAT_Y: _Mat = (_ZERO, -_i, _i, _ZERO)
_MAT_Z: _Mat = (_ONE, _ZERO, _ZERO, -_ONE)
_MAT_S: _Mat = (_ONE, _ZERO, _ZERO, _i)
_MAT_H: _Mat = (_r, _r, _r, -_r)

_D_WORDS = ("", "S", "H", "HS", "SH", "HSH")
_P_LETTERS = ("", "X", "Y", "Z")
_D_MATS = [
    _MAT_I,
    _MAT_S,
    _MAT_H,
    _mmul(_MAT_H, _MAT_S),
    _mmul(_MAT_S, _MAT_H),
    _mmul(_mmul(_MAT_H, _MAT_S), _MAT_H),
]
_P_MATS = [_MAT_I, _MAT_X, _MAT_Y, _MAT_Z]

CLIFFORD_MATS: list[_Mat] = [
    _mmul(_D_MATS[d], _P_MATS[p]) for d in range(6) for p in range(4)
]

_LOOKUP: dict = {}
for _c, _M in enumerate(CLIFFORD_MATS):
    for _j in range(8):
        _k = _mkey(_mscale(Scalar8.omega_pow(_j), _M))
        if _k in _LOOKUP:
            raise RuntimeError("clifford table collision")
        _LOOKUP[_k] = (_c, _j)


def _classify(m: _Mat) -> tuple[int, int]:
    """Return (c, j) with m = w^j * M_c."""
    return _LOOKUP[_mkey(m)]


# MUL[a][b] = (c, j) with M_a M_b = w^j M_c
CLIFFORD_MUL: list[list[tuple[int, int]]] = [
    [_classify(_mmul(CLIFFORD_MATS[a], CLIFFORD_MATS[b])) for b in range(24)]
    for a in range(24)
]
# ADJ[c] = (c', j) with M_c^dagger = w^j M_c'
CLIFFORD_ADJ: list[tuple[int, int]] = [
    _classify(_mdag(CLIFFORD_MATS[c])) for c in range(24)
]

# CONJ[c][p] = (t, q) with M_c P_p M_c^dagger = i^t P_q  (t in {0, 2})
# CONJ_DAG[c][p] likewise for M_c^dagger P_p M_c
def _conj_table(dagger: bool) -> list[list[tuple[int, int]]]:
    table = []
    for c in range(24):
        m = CLIFFORD_MATS[c]
        md = _mdag(m)
        if dagger:
            m, md = md, m
        row = []
        for p in range(4):
            q, j = _classify(_mmul(_mmul(m, _P_MATS[p]), md))
            if q >= 4 or j % 2 != 0:
                raise RuntimeError("pauli conjugation left the pauli group")
            row.append(((j // 2) % 4, q))
        table.append(row)
    return table


CLIFFORD_CONJ = _conj_table(False)
CLIFFORD_CONJ_DAG = _conj_table(True)

# LEFTDEC[c] = (j, p, d) with M_c = w^j P_p D_d
CLIFFORD_LEFTDEC: list[tuple[int, int, int]] = [(-1, -1, -1)] * 24
for _p in range(4):
    for _d in range(6):
        _c, _j = _classify(_mmul(_P_MATS[_p], _D_MATS[_d]))
        if CLIFFORD_LEFTDEC[_c][0] != -1:
            raise RuntimeError("left decomposition not unique")
        CLIFFORD_LEFTDEC[_c] = ((-_j) % 8, _p, _d)

# named indices used across the package
TAG_I = 0
TAG_X = 1
TAG_Y = 2
TAG_Z = 3
TAG_S = 4
TAG_SZ = 7  # equals S^3 = S^dagger up to the table's exact matrix
TAG_H = 8
TAG_HZ = 11
TAG_HSH_X = 21  # equals H S^dagger H exactly; the local-complementation tag

_CANON6 = (TAG_I, TAG_S, TAG_Z, TAG_SZ, TAG_H, TAG_HZ)


def tag_mul(a: int, b: int) -> tuple[int, int]:
    """(index, j) of M_a M_b = w^j M_index."""
    return CLIFFORD_MUL[a][b]


def tag_adj(a: int) -> tuple[int, int]:
    return CLIFFORD_ADJ[a]


def tag_name(c: int) -> str:
    d, p = divmod(c, 4)
    w = _D_WORDS[d] + _P_LETTERS[p]
    return w if w else "I"


_LETTER_TAG = {"I": TAG_I, "X": TAG_X, "Y": TAG_Y, "Z": TAG_Z, "S": TAG_S, "H": TAG_H}


def tag_of_word(word: str) -> tuple[int, int]:
    """Fold a word over I,X,Y,Z,S,H into (index, j), left letter applied last."""
    c, j = TAG_I, 0
    for ch in word:
        if ch not in _LETTER_TAG:
            raise ValueError(f"unknown clifford letter {ch!r}")
        c2, j2 = tag_mul(c, _LETTER_TAG[ch])
        c, j = c2, (j + j2) % 8
    return c, j


def tag_is_canonical(c: int) -> bool:
    """True when the tag is allowed on a vertex of a canonical state."""
    return c in _CANON6


def tag_matrix(c: int) -> _Mat:
    return CLIFFORD_MATS[c]


# ---------------------------------------------------------------------------
# Pauli strings


@dataclass(frozen=True)
class PauliString:
    """i^phase * X^x * Z^z on n qubits, bit j of x/z acting on qubit j."""

    n: int
    x: int
    z: int
    phase: int = 0  # mod 4

    def __post_init__(self):
        object.__setattr__(self, "phase", self.phase % 4)
        mask = (1 << self.n) - 1
        if self.x & ~mask or self.z & ~mask:
            raise ValueError("support outside qubit range")

    @staticmethod
    def identity(n: int) -> PauliString:
        return PauliString(n, 0, 0, 0)

    @staticmethod
    def single(n: int, v: int, letter: str) -> PauliString:
        if letter == "X":
            return PauliString(n, 1 << v, 0, 0)
        if letter == "Z":
            return PauliString(n, 0, 1 << v, 0)
        if letter == "Y":
            return PauliString(n, 1 << v, 1 << v, 1)
        if letter == "I":
            return PauliString(n, 0, 0, 0)
        raise ValueError(f"unknown pauli letter {letter!r}")

    def __mul__(self, other: PauliString) -> PauliString:
        if self.n != other.n:
            raise ValueError("length mismatch")
        # X^a Z^b X^c Z^d = (-1)^{|b&c|} X^(a^c) Z^(b^d)
        ph = self.phase + other.phase + 2 * (self.z & other.x).bit_count()
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, ph)

    def mul_i_pow(self, k: int) -> PauliString:
        return PauliString(self.n, self.x, self.z, self.phase + k)

    def adjoint(self) -> PauliString:
        ph = -self.phase + 2 * (self.x & self.z).bit_count()
        return PauliString(self.n, self.x, self.z, ph)

    @property
    def is_hermitian(self) -> bool:
        return (self.phase + (self.x & self.z).bit_count()) % 2 == 0

    @property
    def weight(self) -> int:
        return (self.x | self.z).bit_count()

    @property
    def sign(self) -> int:
        """For Hermitian strings: 0 if +1 prefactor, 2 if -1."""
        return (self.phase - (self.x & self.z).bit_count()) % 4

    def letter(self, v: int) -> str:
        xb = (self.x >> v) & 1
        zb = (self.z >> v) & 1
        return "IXZY"[xb + 2 * zb] if xb + 2 * zb != 3 else "Y"

    def __str__(self) -> str:
        s = "" if self.sign == 0 else "-"
        return s + "".join(self.letter(v) for v in range(self.n))

    @staticmethod
    def parse(text: str, n: int | None = None) -> PauliString:
        text = text.strip()
        neg = False
        if text[:1] in "+-":
            neg = text[0] == "-"
            text = text[1:].strip()
        if n is not None and len(text) != n:
            raise ValueError("length mismatch")
        x = z = 0
        ph = 2 if neg else 0
        for v, ch in enumerate(text):
            if ch in "XY":
                x |= 1 << v
            if ch in "ZY":
                z |= 1 << v
            if ch == "Y":
                ph += 1
            if ch not in "IXYZ":
                raise ValueError(f"unknown pauli letter {ch!r}")
        return PauliString(len(text), x, z, ph)


def commutes(p: PauliString, q: PauliString) -> bool:
    if p.n != q.n:
        raise ValueError("length mismatch")
    return ((p.x & q.z).bit_count() + (p.z & q.x).bit_count()) % 2 == 0


def pauli_conjugate_layer(p: PauliString, tags: Sequence[int], dagger: bool = False) -> PauliString:
    """C p C^dagger for the tensor-product Clifford layer C given by tags."""
    table = CLIFFORD_CONJ_DAG if dagger else CLIFFORD_CONJ
    x, z, ph = 0, 0, p.phase
    for v in range(p.n):
        xb = (p.x >> v) & 1
        zb = (p.z >> v) & 1
        if not xb and not zb:
            continue
        # site letter as P_idx with local phase: X^x Z^z = (-i)^(xz) P
        idx = 1 if (xb, zb) == (1, 0) else 3 if (xb, zb) == (0, 1) else 2
        if xb and zb:
            ph += 3  # XZ = -i Y
        t, q = table[tags[v]][idx]
        ph += t
        if q == 1:
            x |= 1 << v
        elif q == 3:
            z |= 1 << v
        elif q == 2:
            x |= 1 << v
            z |= 1 << v
            ph += 1  # Y = i X Z
    return PauliString(p.n, x, z, ph)


# ---------------------------------------------------------------------------
# GF(2) linear algebra on packed integer rows


def gf2_rref(rows: Iterable[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form; returns (rows incl. zero rows, pivot cols)."""
    work = list(rows)
    pivots: list[int] = []
    r = 0
    for col in range(ncols):
        bit = 1 << col
        src = next((i for i in range(r, len(work)) if work[i] & bit), None)
        if src is None:
            continue
        work[r], work[src] = work[src], work[r]
        for i in range(len(work)):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
        pivots.append(col)
        r += 1
    return work, pivots


def gf2_rank(rows: Iterable[int], ncols: int) -> int:
    return len(gf2_rref(rows, ncols)[1])


def gf2_in_span(rows: Sequence[int], vec: int, ncols: int) -> bool:
    red, pivots = gf2_rref(rows, ncols)
    for r, col in zip(red, pivots):
        if vec & (1 << col):
            vec ^= r
    return vec == 0


def gf2_solve(rows: Sequence[int], vec: int, ncols: int) -> int | None:
    """Coefficients c (bitmask over row indices) with xor of rows[c] = vec."""
    width = len(rows)
    work = list(rows)
    coef = [1 << i for i in range(width)]
    r = 0
    pivcols = []
    for col in range(ncols):
        bit = 1 << col
        src = next((i for i in range(r, width) if work[i] & bit), None)
        if src is None:
            continue
        work[r], work[src] = work[src], work[r]
        coef[r], coef[src] = coef[src], coef[r]
        for i in range(width):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
                coef[i] ^= coef[r]
        pivcols.append(col)
        r += 1
    target, tc = vec, 0
    for i, col in enumerate(pivcols):
        if target & (1 << col):
            target ^= work[i]
            tc ^= coef[i]
    return tc if target == 0 else None


def gf2_kernel(rows: Sequence[int], ncols: int) -> list[int]:
    """Basis of coefficient masks c with xor of rows[c] = 0."""
    width = len(rows)
    work = list(rows)
    coef = [1 << i for i in range(width)]
    r = 0
    for col in range(ncols):
        bit = 1 << col
        src = next((i for i in range(r, width) if work[i] & bit), None)
        if src is None:
            continue
        work[r], work[src] = work[src], work[r]
        coef[r], coef[src] = coef[src], coef[r]
        for i in range(width):
            if i != r and work[i] & bit:
                work[i] ^= work[r]
                coef[i] ^= coef[r]
        r += 1
    return [coef[i] for i in range(r, width)]


def gf2_nullspace(rows: Iterable[int], ncols: int) -> list[int]:
    """Basis of vectors v with even overlap against every row."""
    red, pivots = gf2_rref(rows, ncols)
    pivset = set(pivots)
    basis = []
    for col in range(ncols):
        if col in pivset:
            continue
        vec = 1 << col
        for row, piv in zip(red, pivots):
            if row & (1 << col):
                vec |= 1 << piv
        basis.append(vec)
    return basis


# ---------------------------------------------------------------------------
# Tableaus


@dataclass(frozen=True)
class Tableau:
    n: int
    rows: tuple[PauliString, ...]

    @property
    def k(self) -> int:
        return self.n - len(self.rows)

    @staticmethod
    def of(rows: Sequence[PauliString]) -> Tableau:
        if not rows:
            raise ValueError("empty tableau needs explicit n")
        return Tableau(rows[0].n, tuple(rows))

    @staticmethod
    def parse(text: str) -> Tableau:
        rows = []
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if line:
                rows.append(PauliString.parse(line))
        if not rows:
            raise ValueError("no rows in tableau text")
        n = rows[0].n
        if any(r.n != n for r in rows):
            raise ValueError("ragged tableau rows")
        return Tableau(n, tuple(rows))

    def __str__(self) -> str:
        return "\n".join(("+" if r.sign == 0 else "") + str(r) for r in self.rows)


def tableau_valid(t: Tableau) -> bool:
    rows = t.rows
    if len(rows) > t.n:
        return False
    for r in rows:
        if r.n != t.n or not r.is_hermitian:
            return False
    for i in range(len(rows)):
        for j in range(i + 1, len(rows)):
            if not commutes(rows[i], rows[j]):
                return False
    vecs = [r.x | (r.z << t.n) for r in rows]
    return gf2_rank(vecs, 2 * t.n) == len(rows)
