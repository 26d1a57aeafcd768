import random

import pytest

from pivotwalk.geometry import (
    ChainParams,
    chain_shadow_via_waypoints,
    check_canoe,
    check_fellowtravel_lemma,
    in_chain_shadow,
    is_chain,
)
from pivotwalk.words import IDENTITY, Word, dist, gromov_product

A, B = 1, 2


def power(letter, n):
    return Word([letter] * n)


def random_alternating_chain(rng, n_points, seg_len, k=2):
    """Random chain whose consecutive steps never share a generator, so
    every interior Gromov product is 0 and every step has length seg_len.
    """
    points = [IDENTITY]
    prev_gen = 0
    for _ in range(n_points - 1):
        gen = rng.randrange(1, k + 1)
        while gen == prev_gen:
            gen = rng.randrange(1, k + 1)
        prev_gen = gen
        step = Word([gen * rng.choice([1, -1])] * seg_len)
        points.append(points[-1] * step)
    return points


class TestIsChain:
    def test_simple_true(self):
        pts = [IDENTITY, power(A, 5), power(A, 5) * power(B, 5)]
        assert is_chain(pts, ChainParams(0, 5))

    def test_distance_below_D(self):
        assert not is_chain([IDENTITY, Word([A])], ChainParams(0, 5))

    def test_backtracking_product(self):
        # (e, e)_{a^5} = 5 > 0
        pts = [IDENTITY, power(A, 5), IDENTITY]
        assert not is_chain(pts, ChainParams(0, 5))

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            is_chain([IDENTITY], ChainParams(0, 1))

    def test_half_integer_thresholds(self):
        pts = [IDENTITY, power(A, 2), power(A, 2) * power(B, 2)]
        assert is_chain(pts, ChainParams(0.5, 1.5))

    def test_rejects_non_half_integer(self):
        with pytest.raises(ValueError):
            ChainParams(0.3, 1)


class TestCanoe:
    def test_simple_chain(self):
        pts = [IDENTITY, power(A, 5), power(A, 5) * power(B, 5)]
        report = check_canoe(pts, ChainParams(0, 5))
        assert report.ok
        assert report.endpoint_distance == 10 >= 2

    def test_two_point_chain_trivial(self):
        pts = [IDENTITY, power(B, 3)]
        report = check_canoe(pts, ChainParams(1, 3))
        assert report.ok

    def test_precondition_enforced(self):
        pts = [IDENTITY, power(A, 2), power(A, 2) * power(B, 2)]
        with pytest.raises(ValueError):
            check_canoe(pts, ChainParams(1, 2))  # D < 2C + 1

    def test_non_chain_rejected(self):
        with pytest.raises(ValueError):
            check_canoe([IDENTITY, Word([A])], ChainParams(0, 5))

    def test_randomized_sweep(self):
        # Lemma as an executable theorem: zero counterexamples expected.
        rng = random.Random(271828)
        for _ in range(2000):
            n_points = rng.randrange(2, 9)
            seg = rng.randrange(1, 12)
            pts = random_alternating_chain(rng, n_points, seg)
            params = ChainParams(0, seg)
            report = check_canoe(pts, params)
            assert report.ok

    def test_randomized_sweep_with_slack(self):
        # chains built with small controlled cancellation, C = 1
        rng = random.Random(314159)
        for _ in range(1000):
            n_points = rng.randrange(2, 7)
            pts = [IDENTITY]
            prev_last = 0
            D = 4
            for _ in range(n_points - 1):
                while True:
                    gen = rng.randrange(1, 4)
                    sgn = rng.choice([1, -1])
                    head = gen * sgn
                    if head != -prev_last:  # cancellation would exceed C=1... keep 0
                        break
                seg_letters = [head]
                while len(seg_letters) < D + rng.randrange(0, 4):
                    nxt = rng.randrange(1, 4) * rng.choice([1, -1])
                    if nxt != -seg_letters[-1]:
                        seg_letters.append(nxt)
                pts.append(pts[-1] * Word(seg_letters))
                prev_last = seg_letters[-1]
            if is_chain(pts, ChainParams(1, D)):
                assert check_canoe(pts, ChainParams(1, D)).ok


class TestChainShadow:
    def test_basic_membership(self):
        z = power(A, 5) * power(B, 5)
        assert in_chain_shadow(z, IDENTITY, power(A, 5), ChainParams(1, 0))

    def test_self_not_in_shadow(self):
        y = IDENTITY
        assert not in_chain_shadow(y, y, power(A, 5), ChainParams(1, 0))

    def test_origin_too_close(self):
        assert not in_chain_shadow(IDENTITY, IDENTITY, power(A, 5), ChainParams(1, 0))

    def test_monotone_in_C_far_regime(self):
        # Monotonicity in C holds once z is far enough for the larger
        # threshold: the shadow's own distance requirement 2C + 2*delta + 1
        # grows with C, so the bare implication fails for nearby z (e.g.
        # z = a^3, y_plus = a^2, C = 1 -> C' = 2).
        rng = random.Random(97)
        checked = 0
        for _ in range(500):
            y = IDENTITY
            y_plus = power(rng.randrange(1, 3), rng.randrange(1, 8))
            z = Word([rng.randrange(1, 3) * rng.choice([1, -1]) for _ in range(14)])
            for c in range(0, 4):
                if dist(y, z) < 2 * (c + 1) + 1:
                    continue
                if in_chain_shadow(z, y, y_plus, ChainParams(c, 0)):
                    checked += 1
                    assert in_chain_shadow(z, y, y_plus, ChainParams(c + 1, 0))
        assert checked > 100

    def test_not_monotone_near_regime(self):
        # the documented counterexample pinning down the proviso above
        z, y_plus = power(A, 3), power(A, 2)
        assert in_chain_shadow(z, IDENTITY, y_plus, ChainParams(1, 0))
        assert not in_chain_shadow(z, IDENTITY, y_plus, ChainParams(2, 0))

    def test_true_implies_two_point_chain_witness(self):
        # the predicate is by construction a sound witness
        rng = random.Random(101)
        hits = 0
        for _ in range(500):
            y = IDENTITY
            y_plus = power(1, 5)
            z = Word(
                [rng.randrange(1, 3) * rng.choice([1, -1]) for _ in range(12)]
            )
            p = ChainParams(1, 0)
            if in_chain_shadow(z, y, y_plus, p):
                hits += 1
                assert dist(y, z) >= 2 * 1 + 1
                assert gromov_product(y, z, y_plus) <= 1
        assert hits > 0

    def test_waypoint_fallback(self):
        # a two-hop chain behind y_plus that the two-point test also sees
        y = IDENTITY
        y_plus = power(A, 5)
        mid = power(A, 5) * power(B, 5)
        z = mid * power(A, 5)
        p = ChainParams(1, 0)
        assert chain_shadow_via_waypoints(z, y, y_plus, p, [mid])


class TestFellowTravel:
    def test_identity_isometry(self):
        x, y = IDENTITY, power(A, 10)
        a = power(A, 5)
        assert check_fellowtravel_lemma(a, x, y, IDENTITY, C=0, K=1)

    def test_translation_along_axis(self):
        x, y = IDENTITY, power(A, 10)
        a = power(A, 5)
        g = Word([A])
        # d(a^5, a^6) = 1 <= 2C + 2K = 2
        assert check_fellowtravel_lemma(a, x, y, g, C=0, K=1)

    def test_precondition_violation_raises(self):
        x, y = IDENTITY, power(A, 10)
        far = power(B, 9)
        with pytest.raises(ValueError):
            check_fellowtravel_lemma(far, x, y, IDENTITY, C=0, K=1)
        with pytest.raises(ValueError):
            check_fellowtravel_lemma(power(A, 5), x, y, power(B, 9), C=0, K=1)

    def test_randomized_sweep(self):
        # g = x v0^{+-1} x^-1 translates the segment [x, x v0^m]; a sits
        # within C of it by construction.
        rng = random.Random(1618)
        for _ in range(2000):
            k = 3
            v0_len = rng.randrange(1, 4)
            while True:
                v0_letters = [rng.randrange(1, k + 1) * rng.choice([1, -1])]
                while len(v0_letters) < v0_len:
                    nxt = rng.randrange(1, k + 1) * rng.choice([1, -1])
                    if nxt != -v0_letters[-1]:
                        v0_letters.append(nxt)
                v0 = Word(v0_letters)
                # cyclically reduced => powers have length m*|v0|
                if len(v0) == v0_len and v0_letters[0] != -v0_letters[-1]:
                    break
            m = rng.randrange(1, 6)
            x = Word([rng.randrange(1, k + 1) * rng.choice([1, -1]) for _ in range(5)])
            y = x * v0**m
            K = v0_len
            C = rng.randrange(0, 3)
            # point on [x, y] plus a spur of length <= C
            t = rng.randrange(0, m * v0_len + 1)
            on_axis = x * Word((v0**m).letters[:t], _reduced=True)
            spur_len = rng.randrange(0, C + 1)
            a = on_axis
            for _ in range(spur_len):
                nxt = rng.randrange(1, k + 1) * rng.choice([1, -1])
                a = a * Word([nxt])
            if gromov_product(x, y, a) > C:
                continue  # spur accidentally cancelled along the axis
            g = x * (v0 ** rng.choice([1, -1])) * x.inverse()
            if dist(x, g * x) > K or dist(y, g * y) > K:
                continue
            assert check_fellowtravel_lemma(a, x, y, g, C=C, K=K)
