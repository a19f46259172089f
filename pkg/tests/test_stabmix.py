"""Stabilizer sums: normalization, C3 gate application, pairwise merging."""

import itertools
import random

import numpy as np
import pytest

from conftest import random_state

from stabgraph.core import Scalar8, TAG_H, TAG_HZ
from stabgraph.graphstate import ExtendedGraphState, apply_local, canonicalize
from stabgraph.oracle import (
    DenseState,
    dense_of,
    enumerate_stab_states,
    graph_state_dense,
)
from stabgraph.stabmix import (
    StabilizerSum,
    apply_c3,
    apply_clifford,
    reduce,
    try_merge_pair,
)

ONE = Scalar8.one()
HALF = Scalar8(1, 0, 0, 0, hp=2)
RT_HALF = Scalar8.sqrt2_pow(-1)
RT8 = Scalar8.sqrt2_pow(-3)
OMEGA = Scalar8.omega_pow(1)
IMAG = Scalar8.i_pow(1)

# unit and non-unit exact coefficients for weighted-pair trials
COEFF_POOL = [
    ONE,
    OMEGA,
    IMAG,
    Scalar8.of_int(-1),
    RT_HALF,
    Scalar8(1, 1, 0, 0, 2),
    Scalar8(0, 1, 0, -1, 1),
]


def egs(n, edges=(), local=None):
    return ExtendedGraphState(n, edges, local)


def plus_sum(n):
    return StabilizerSum.of_state(canonicalize(egs(n)))


def dense_magic(n):
    d = DenseState.plus(n)
    for v in range(n):
        d.apply_gate("T", (v,))
    return d


class TestStabilizerSum:
    def test_normalization_merges_equal_states(self):
        s = canonicalize(egs(2, [(0, 1)]))
        total = StabilizerSum(2, [(ONE, s), (OMEGA, s)])
        assert total.rank == 1
        assert total.terms[0][0] == ONE + OMEGA

    def test_cancelling_terms_leave_empty_sum(self):
        s = canonicalize(egs(2, [(0, 1)], {0: "S"}))
        total = StabilizerSum(2, [(ONE, s), (Scalar8.of_int(-1), s)])
        assert total.rank == 0
        assert dense_of(total).is_zero()

    def test_scalars_fold_into_coefficients(self):
        raw = ExtendedGraphState(1, (), {0: "H"}, Scalar8.omega_pow(3))
        total = StabilizerSum.of_state(raw)
        (coeff, state), = total.terms
        assert state.scalar == ONE
        assert coeff == Scalar8.omega_pow(3)

    def test_term_order_is_input_independent(self):
        rng = random.Random(5)
        states = [canonicalize(random_state(rng, 3)) for _ in range(6)]
        terms = [(COEFF_POOL[i % len(COEFF_POOL)], s) for i, s in enumerate(states)]
        shuffled = terms[:]
        rng.shuffle(shuffled)
        assert StabilizerSum(3, terms) == StabilizerSum(3, shuffled)

    def test_qubit_count_mismatch_rejected(self):
        with pytest.raises(ValueError):
            StabilizerSum(2, [(ONE, canonicalize(egs(3)))])

    def test_immutable(self):
        total = plus_sum(2)
        with pytest.raises(AttributeError):
            total.n = 5

    def test_json_round_trip(self):
        rng = random.Random(9)
        s = StabilizerSum(
            3,
            [(rng.choice(COEFF_POOL), canonicalize(random_state(rng, 3))) for _ in range(4)],
        )
        data = s.to_json_dict()
        assert set(data) == {"n", "terms"}
        for rec in data["terms"]:
            assert set(rec) == {"coefficient", "state"}
            assert set(rec["coefficient"]) == {"a", "halfpow"}
            assert len(rec["coefficient"]["a"]) == 4
        assert StabilizerSum.from_json_dict(data) == s


class TestApplyC3:
    def test_t_on_plus_two_term_pattern(self):
        out = apply_c3(plus_sum(1), "T", (0,))
        assert out.rank == 2
        (c0, s0), (c1, s1) = out.terms
        assert (c0, s0.tags, s0.edges()) == (RT_HALF, (TAG_H,), [])
        assert (c1, s1.tags, s1.edges()) == (RT_HALF * OMEGA, (TAG_HZ,), [])

    def test_arity_and_range_errors(self):
        s = plus_sum(3)
        with pytest.raises(ValueError):
            apply_c3(s, "T", (0, 1))
        with pytest.raises(ValueError):
            apply_c3(s, "CCZ", (0, 1, 1))
        with pytest.raises(ValueError):
            apply_c3(s, "CS", (0, 3))
        with pytest.raises(ValueError):
            apply_c3(s, "CCY", (0, 1, 2))

    @pytest.mark.parametrize(
        "gate,arity",
        [("T", 1), ("CS", 2), ("CH", 2), ("CCZ", 3), ("CCX", 3), ("CSWAP", 3)],
    )
    def test_matches_dense_gate(self, gate, arity):
        rng = random.Random(hash(gate) % 100000)
        for _ in range(25):
            n = rng.randint(arity, 4)
            start = canonicalize(random_state(rng, n))
            qs = tuple(rng.sample(range(n), arity))
            out = apply_c3(StabilizerSum.of_state(start), gate, qs)
            want = graph_state_dense(start)
            want.apply_gate(gate, qs)
            assert dense_of(out) == want
            assert out.rank <= 2

    @pytest.mark.parametrize("gate", ["CS", "CH", "CCZ", "CCX", "CSWAP"])
    def test_gate_squared_collapses_to_clifford(self, gate):
        # the square of each of these is Clifford (CZ for CS, identity for
        # the rest), so two applications plus reduce must give rank 1
        arity = {"CS": 2, "CH": 2, "CCZ": 3, "CCX": 3, "CSWAP": 3}[gate]
        rng = random.Random(31)
        for _ in range(10):
            start = canonicalize(random_state(rng, arity + 1))
            qs = tuple(rng.sample(range(start.n), arity))
            out = apply_c3(apply_c3(StabilizerSum.of_state(start), gate, qs), gate, qs)
            out = reduce(out)
            want = graph_state_dense(start)
            if gate == "CS":
                want.apply_gate("CZ", qs)
            assert out.rank == 1
            assert dense_of(out) == want

    def test_cs_twice_equals_cz_on_every_two_qubit_state(self):
        for st in enumerate_stab_states(2):
            out = reduce(apply_c3(apply_c3(StabilizerSum.of_state(st), "CS", (0, 1)), "CS", (0, 1)))
            want = graph_state_dense(st)
            want.apply_gate("CZ", (0, 1))
            assert out.rank == 1
            assert dense_of(out) == want

    def test_t_twice_is_s(self):
        out = reduce(apply_c3(apply_c3(plus_sum(1), "T", (0,)), "T", (0,)))
        want = DenseState.plus(1)
        want.apply_gate("S", (0,))
        assert out.rank == 1
        assert dense_of(out) == want

    def test_apply_clifford_matches_dense(self):
        rng = random.Random(77)
        gates = [("H", 1), ("S", 1), ("X", 1), ("Y", 1), ("Z", 1), ("CZ", 2), ("CX", 2)]
        for _ in range(30):
            n = rng.randint(2, 4)
            start = canonicalize(random_state(rng, n))
            s = StabilizerSum.of_state(start)
            want = graph_state_dense(start)
            for _ in range(6):
                g, a = rng.choice(gates)
                qs = tuple(rng.sample(range(n), a))
                s = apply_clifford(s, g, qs)
                want.apply_gate(g, qs)
            assert dense_of(s) == want


def _stab_rays(n):
    rays = []
    for st in enumerate_stab_states(n):
        v = graph_state_dense(st).to_complex()
        lead = np.flatnonzero(np.abs(v) > 1e-9)[0]
        rays.append(v / v[lead])
    return np.stack(rays)


def _is_stab_ray(vec, rays):
    nz = np.flatnonzero(np.abs(vec) > 1e-9)
    if len(nz) == 0:
        return True
    v = vec / vec[nz[0]]
    return bool(np.any(np.all(np.abs(rays - v) < 1e-9, axis=1)))


class TestTryMergePair:
    def test_basis_pair_gives_plus(self):
        zero = canonicalize(egs(1, (), {0: "H"}))
        one = canonicalize(egs(1, (), {0: "HZ"}))
        coeff, state = try_merge_pair(RT_HALF, zero, RT_HALF, one)
        assert coeff == ONE
        assert (state.tags, state.edges(), state.scalar) == ((0,), [], ONE)

    def test_pauli_case_three_qubits(self):
        # |000> split along the Z value of the first qubit
        zero3 = canonicalize(egs(3, (), {0: "H", 1: "H", 2: "H"}))
        s1 = canonicalize(egs(3, (), {1: "H", 2: "H"}))
        s2 = canonicalize(egs(3, (), {0: "Z", 1: "H", 2: "H"}))
        got = try_merge_pair(RT_HALF, s1, RT_HALF, s2)
        assert got == (ONE, zero3)

    def test_phase_gate_case_three_qubits(self):
        # |000> as a weighted pair related by S on the top of a path graph
        zero3 = canonicalize(egs(3, (), {0: "H", 1: "H", 2: "H"}))
        psi = canonicalize(egs(3, [(0, 2), (1, 2)], {0: "H", 1: "H"}))
        spsi = canonicalize(apply_local(psi, 2, "S"))
        got = try_merge_pair(Scalar8(1, 0, -1, 0, 1), psi, Scalar8(1, 0, 1, 0, 1), spsi)
        assert got == (ONE, zero3)

    def test_double_z_cz_case_three_qubits(self):
        # |000> as a star-plus-triangle pair with unit coefficients
        zero3 = canonicalize(egs(3, (), {0: "H", 1: "H", 2: "H"}))
        a = canonicalize(egs(3, [(0, 1), (0, 2)], {0: "H"}))
        b = canonicalize(egs(3, [(0, 1), (0, 2), (1, 2)], {0: "H", 1: "Z", 2: "Z"}))
        got = try_merge_pair(ONE, a, ONE, b)
        assert got == (ONE, zero3)

    def test_non_stabilizer_sum_refused(self):
        zero = canonicalize(egs(1, (), {0: "H"}))
        plus = canonicalize(egs(1))
        assert try_merge_pair(ONE, zero, IMAG, plus) is None

    def test_zero_coefficients_short_circuit(self):
        s1 = canonicalize(egs(2, [(0, 1)]))
        s2 = canonicalize(egs(2))
        assert try_merge_pair(Scalar8.zero(), s1, OMEGA, s2) == (OMEGA, s2)
        assert try_merge_pair(OMEGA, s1, Scalar8.zero(), s2) == (OMEGA, s1)

    def test_equal_states_add_coefficients(self):
        s = canonicalize(egs(2, [(0, 1)], {1: "S"}))
        coeff, state = try_merge_pair(ONE, s, OMEGA, s)
        assert coeff == ONE + OMEGA and state.key() == s.key()
        coeff, _ = try_merge_pair(ONE, s, Scalar8.of_int(-1), s)
        assert coeff.is_zero

    def test_accepts_non_canonical_inputs(self):
        s1 = egs(1, (), {0: "H"})
        s2 = egs(1, (), {0: "HZ"})
        got = try_merge_pair(RT_HALF, s1, RT_HALF, s2)
        assert got is not None and got[0] == ONE

    def test_mismatched_sizes_rejected(self):
        with pytest.raises(ValueError):
            try_merge_pair(ONE, canonicalize(egs(1)), ONE, canonicalize(egs(2)))

    @pytest.mark.parametrize("n", [1, 2])
    def test_exhaustive_small_sound_and_complete(self, n):
        # every pair of distinct canonical states with assorted exact
        # coefficients: merges must match the dense sum exactly, refusals
        # must correspond to sums outside the stabilizer-ray census
        rng = random.Random(40 + n)
        rays = _stab_rays(n)
        states = enumerate_stab_states(n)
        merged = refused = 0
        for s1, s2 in itertools.combinations(states, 2):
            for _ in range(3):
                c1 = rng.choice(COEFF_POOL)
                c2 = rng.choice(COEFF_POOL)
                total = graph_state_dense(s1).scaled(c1).add(graph_state_dense(s2).scaled(c2))
                got = try_merge_pair(c1, s1, c2, s2)
                if got is None:
                    refused += 1
                    assert not _is_stab_ray(total.to_complex(), rays)
                else:
                    merged += 1
                    assert graph_state_dense(got[1]).scaled(got[0]) == total
        assert merged > 0 and refused > 0

    def test_random_three_qubit_pairs(self):
        rng = random.Random(41)
        rays = _stab_rays(3)
        checked_none = 0
        for _ in range(250):
            s1 = canonicalize(random_state(rng, 3))
            s2 = canonicalize(random_state(rng, 3))
            c1 = rng.choice(COEFF_POOL)
            c2 = rng.choice(COEFF_POOL)
            total = graph_state_dense(s1).scaled(c1).add(graph_state_dense(s2).scaled(c2))
            got = try_merge_pair(c1, s1, c2, s2)
            if got is None:
                if checked_none < 120:
                    checked_none += 1
                    assert not _is_stab_ray(total.to_complex(), rays)
            else:
                assert graph_state_dense(got[1]).scaled(got[0]) == total

    def test_argument_order_irrelevant(self):
        rng = random.Random(42)
        for _ in range(150):
            s1 = canonicalize(random_state(rng, 3))
            s2 = canonicalize(random_state(rng, 3))
            c1 = rng.choice(COEFF_POOL)
            c2 = rng.choice(COEFF_POOL)
            a = try_merge_pair(c1, s1, c2, s2)
            b = try_merge_pair(c2, s2, c1, s1)
            if a is None:
                assert b is None
            else:
                assert b is not None
                assert graph_state_dense(a[1]).scaled(a[0]) == graph_state_dense(b[1]).scaled(b[0])


def _random_circuit(rng, n, c3_count):
    c3 = [g for g in (("T", 1), ("CS", 2), ("CH", 2), ("CCZ", 3), ("CCX", 3), ("CSWAP", 3)) if g[1] <= n]
    cliff = [("H", 1), ("S", 1), ("X", 1), ("Z", 1), ("CZ", 2), ("CX", 2)]
    gates = []
    for _ in range(c3_count):
        for _ in range(rng.randrange(3)):
            g, a = rng.choice(cliff)
            gates.append((g, tuple(rng.sample(range(n), a)), False))
        g, a = rng.choice(c3)
        gates.append((g, tuple(rng.sample(range(n), a)), True))
    return gates


class TestReduce:
    def test_identical_pair_becomes_single_term(self):
        s = canonicalize(egs(2, [(0, 1)]))
        out = reduce(StabilizerSum(2, [(ONE, s), (IMAG, s)]))
        assert out.rank == 1

    def test_two_qubit_magic_closed_form(self):
        out = reduce(apply_c3(apply_c3(plus_sum(2), "T", (0,)), "T", (1,)))
        want = StabilizerSum(
            2,
            [
                (RT_HALF, egs(2, [(0, 1)], {0: "S", 1: "H"})),
                (RT_HALF * OMEGA, egs(2, [(0, 1)], {0: "HZ"})),
            ],
        )
        assert out == want
        assert dense_of(out) == dense_magic(2)

    def test_never_increases_count_and_preserves_vector(self):
        rng = random.Random(51)
        for _ in range(40):
            n = rng.randint(1, 4)
            terms = [
                (rng.choice(COEFF_POOL), canonicalize(random_state(rng, n)))
                for _ in range(rng.randint(1, 5))
            ]
            s = StabilizerSum(n, terms)
            out = reduce(s)
            assert out.rank <= s.rank
            assert dense_of(out) == dense_of(s)

    def test_random_c3_circuits_match_dense(self):
        rng = random.Random(52)
        for trial in range(50):
            n = rng.randint(2, 5)
            c3_count = rng.randint(1, 4)
            start = canonicalize(random_state(rng, n))
            s = StabilizerSum.of_state(start)
            want = graph_state_dense(start)
            for g, qs, is_c3 in _random_circuit(rng, n, c3_count):
                if is_c3:
                    s = reduce(apply_c3(s, g, qs))
                else:
                    s = apply_clifford(s, g, qs)
                want.apply_gate(g, qs)
            assert s.rank <= 2 ** c3_count
            assert dense_of(s) == want

    def test_deterministic(self):
        rng = random.Random(53)
        terms = [
            (rng.choice(COEFF_POOL), canonicalize(random_state(rng, 3))) for _ in range(5)
        ]
        s = StabilizerSum(3, terms)
        assert reduce(s) == reduce(s)


def _t3_terms(star, complete):
    zs = {0: "Z", 1: "Z", 2: "Z"}
    return [
        ((IMAG - OMEGA) * HALF, egs(3, (), zs)),
        ((ONE + OMEGA) * HALF, egs(3, star, {0: "H", 1: "H", 2: "S"})),
        (-(IMAG + OMEGA) * HALF, egs(3, complete, zs)),
    ]


class TestMagicFixtures:
    STAR3 = [(0, 2), (1, 2)]
    K3 = [(0, 1), (0, 2), (1, 2)]
    STAR6_LOW = [(0, k) for k in range(1, 6)]
    STAR6_HIGH = [(k, 5) for k in range(5)]
    K6 = [(a, b) for a in range(6) for b in range(a + 1, 6)]

    def test_three_qubit_rank3_decomposition(self):
        s = StabilizerSum(3, _t3_terms(self.STAR3, self.K3))
        assert s.rank == 3
        assert dense_of(s) == dense_magic(3)

    def test_three_qubit_complete_graph_form(self):
        words = {v: "HSZ" for v in range(3)}
        zs = {v: "Z" for v in range(3)}
        s = StabilizerSum(
            3,
            [
                ((IMAG - OMEGA) * HALF, egs(3, (), zs)),
                ((IMAG + OMEGA) * HALF, egs(3, self.K3, words)),
                (-(IMAG + OMEGA) * HALF, egs(3, self.K3, zs)),
            ],
        )
        assert s == StabilizerSum(3, _t3_terms(self.STAR3, self.K3))
        assert dense_of(s) == dense_magic(3)

    def _t6(self):
        return StabilizerSum(
            6,
            [
                (-IMAG * HALF, egs(6, self.STAR6_LOW, {0: "HZ", 1: "S", 2: "S", 3: "S", 4: "S", 5: "S"})),
                (Scalar8.omega_pow(3) * HALF, egs(6, self.STAR6_LOW, {0: "H"})),
                (OMEGA * RT8, egs(6, self.STAR6_HIGH, {0: "HZ", 1: "H", 2: "H", 3: "H", 4: "H", 5: "Z"})),
                (RT8, egs(6, self.STAR6_HIGH, {0: "H", 1: "H", 2: "H", 3: "H", 4: "H", 5: "SZ"})),
                (-HALF, egs(6, self.K6, {0: "HZ", 1: "SZ", 2: "SZ", 3: "SZ", 4: "SZ", 5: "SZ"})),
                (-OMEGA * HALF, egs(6, self.K6, {0: "H", 1: "Z", 2: "Z", 3: "Z", 4: "Z", 5: "Z"})),
            ],
        )

    def test_six_qubit_rank6_decomposition(self):
        s = self._t6()
        assert s.rank == 6
        assert dense_of(s) == dense_magic(6)

    def test_six_qubit_complete_graph_form(self):
        s = StabilizerSum(
            6,
            [
                (-HALF, egs(6, self.K6, {0: "SHZ", 1: "Z", 2: "Z", 3: "Z", 4: "Z", 5: "Z"})),
                (Scalar8.omega_pow(3) * HALF, egs(6, self.K6, {0: "SHSSZ", 1: "SZ", 2: "SZ", 3: "SZ", 4: "SZ", 5: "SZ"})),
                (-IMAG * RT8, egs(6, self.K6, {0: "SXHS", 1: "HS", 2: "HS", 3: "HS", 4: "HS", 5: "HS"})),
                (Scalar8.omega_pow(7) * RT8, egs(6, self.K6, {v: "HS" for v in range(6)})),
                (-HALF, egs(6, self.K6, {0: "HSZSZ", 1: "SZ", 2: "SZ", 3: "SZ", 4: "SZ", 5: "SZ"})),
                (-OMEGA * HALF, egs(6, self.K6, {0: "HZZ", 1: "Z", 2: "Z", 3: "Z", 4: "Z", 5: "Z"})),
            ],
        )
        assert s == self._t6()
        assert dense_of(s) == dense_magic(6)

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5, 6])
    def test_pipeline_rank_and_vector(self, n):
        s = plus_sum(n)
        for v in range(n):
            s = reduce(apply_c3(s, "T", (v,)))
        assert dense_of(s) == dense_magic(n)
        assert s.rank == 2 ** ((n + 1) // 2)
