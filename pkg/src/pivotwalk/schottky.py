"""Schottky sets in free groups, the convolution decomposition, and
alternating-walk sampling.

A finite set S of group elements is (epsilon, C, D)-Schottky when, for
every pair of points (x, y), all but an epsilon-fraction of s in S keep
the Gromov products (x, s y)_e and (x, s^-1 y)_e at most C, and every s
moves the origin at least D.  The canonical construction below uses D-th
powers of distinct generators; the verifier then certifies the claimed
parameters, which is all downstream code relies on.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import rng as rnglib
from .measures import Measure, convolve, convolve_power
from .words import IDENTITY, Word, dist, gromov_product, word_from_str, word_to_str

__all__ = [
    "SchottkySet",
    "canonical_schottky",
    "VerifyReport",
    "verify_schottky",
    "verify_schottky_exhaustive",
    "decompose",
    "AlternatingSpec",
    "canonical_spec",
    "Block",
    "AlternatingPath",
    "sample_alternating",
    "KappaTruncationError",
]

KAPPA_STEP_LIMIT = 10**6


@dataclass(frozen=True)
class SchottkySet:
    """Finite set of group elements with claimed (epsilon, C, D) parameters.

    The distance condition d(e, s) >= D is checked at construction; the
    two product conditions are what verify_schottky certifies.
    """

    elements: tuple[Word, ...]
    epsilon: float
    C: float
    D: float

    def __post_init__(self):
        if not self.elements:
            raise ValueError("Schottky set must be non-empty")
        if len(set(self.elements)) != len(self.elements):
            raise ValueError("Schottky set has repeated elements")
        if not 0 < self.epsilon < 1:
            raise ValueError("epsilon must be in (0, 1)")
        short = [s for s in self.elements if len(s) < self.D]
        if short:
            raise ValueError(f"elements shorter than D={self.D}: {short[:3]}")

    def __len__(self) -> int:
        return len(self.elements)

    def to_json_dict(self) -> dict:
        return {
            "elements": [word_to_str(s) for s in self.elements],
            "epsilon": self.epsilon,
            "C": self.C,
            "D": self.D,
        }

    @classmethod
    def from_json_dict(cls, data) -> "SchottkySet":
        return cls(
            tuple(word_from_str(s) for s in data["elements"]),
            float(data["epsilon"]),
            float(data["C"]),
            float(data["D"]),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "SchottkySet":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def canonical_schottky(k: int, D: int) -> SchottkySet:
    """S = {x_1^D, ..., x_k^D} in F_k with parameters (2/k, 1, D).

    Why (2/k, 1): a product (x, x_j^D y)_e exceeds 1 only if x starts with
    two letters of x_j^D y.  For fixed (x, y) at most one j matches via
    the surviving power prefix (x starts x_j x_j) and at most one j via
    deep cancellation of y's leading run, so at most 2 of the k elements
    can fail either product condition.  k >= 5 keeps 2/k below 1/2.
    """
    if k < 5:
        raise ValueError("need rank k >= 5 so that epsilon = 2/k stays useful")
    if D < 1:
        raise ValueError("need D >= 1")
    elements = tuple(Word([j] * D, _reduced=True) for j in range(1, k + 1))
    return SchottkySet(elements, epsilon=2.0 / k, C=1, D=D)


@dataclass(frozen=True)
class VerifyReport:
    cond1_worst: float
    cond2_worst: float
    cond3_ok: bool
    epsilon: float
    mode: str  # "sampled" or "exhaustive y<=L, all x"
    pairs_checked: int

    @property
    def passed(self) -> bool:
        return (
            self.cond1_worst >= 1 - self.epsilon - 1e-12
            and self.cond2_worst >= 1 - self.epsilon - 1e-12
            and self.cond3_ok
        )


def verify_schottky(
    S: SchottkySet,
    epsilon: float,
    C: float,
    D: float,
    test_points: Sequence[tuple[Word, Word]],
) -> VerifyReport:
    """Check the three defining conditions over explicit (x, y) pairs.

    Reports the worst passing fractions for conditions (1) and (2) and
    whether every element satisfies d(e, s) >= D.
    """
    elements = S.elements
    inverses = [s.inverse() for s in elements]
    n = len(elements)
    worst1 = worst2 = 1.0
    o = IDENTITY
    for x, y in test_points:
        ok1 = sum(1 for s in elements if gromov_product(x, s * y, o) <= C)
        ok2 = sum(1 for si in inverses if gromov_product(x, si * y, o) <= C)
        worst1 = min(worst1, ok1 / n)
        worst2 = min(worst2, ok2 / n)
    cond3 = all(dist(o, s) >= D for s in elements)
    return VerifyReport(worst1, worst2, cond3, epsilon, "sampled", len(test_points))


# -- exhaustive certification ----------------------------------------------
#
# In the tree, (x, s y)_e > C happens exactly when x and the reduced word
# s y share their first C+1 letters.  The failure count for a pair (x, y)
# therefore depends on x only through its (C+1)-prefix, and the worst x
# for a given y realizes the most common (C+1)-prefix among {s y : s in S}.
# Sweeping y exhaustively and taking that max multiplicity certifies the
# condition for every x whatsoever, which is stronger than restricting x
# to the same length bound.


def _levels(k: int, max_len: int):
    """Yield arrays of all reduced words of each exact length 0..max_len.

    Each array has shape (count, length), letters as int8.
    """
    yield np.zeros((1, 0), dtype=np.int8)
    alphabet = np.array(
        [j for j in range(1, k + 1)] + [-j for j in range(1, k + 1)], dtype=np.int8
    )
    level = alphabet.reshape(-1, 1)
    yield level
    for _ in range(max_len - 1):
        last = level[:, -1]
        # each word extends by the 2k-1 letters that do not cancel
        ext = np.broadcast_to(alphabet, (len(level), 2 * k)).copy()
        keep = ext != -last[:, None]
        rows = np.repeat(np.arange(len(level)), 2 * k - 1)
        nxt = np.empty((len(level) * (2 * k - 1), level.shape[1] + 1), dtype=np.int8)
        nxt[:, :-1] = level[rows]
        nxt[:, -1] = ext[keep]
        level = nxt
        yield level


def _prefix_codes(ys: np.ndarray, s_letters: np.ndarray, c_plus_1: int, k: int):
    """Codes of the (C+1)-prefix of the reduced product s y for every row y.

    Rows whose product is shorter than C+1 letters can never produce a
    Gromov product above C and get the sentinel code -1.
    """
    n, ylen = ys.shape
    slen = len(s_letters)
    # cancellation depth of y against the tail of s
    cancel = np.zeros(n, dtype=np.int32)
    alive = np.ones(n, dtype=bool)
    for t in range(min(slen, ylen)):
        alive = alive & (ys[:, t] == -s_letters[slen - 1 - t])
        cancel += alive
    rem_s = slen - cancel  # surviving letters of s
    prod_len = rem_s + (ylen - cancel)
    codes = np.zeros(n, dtype=np.int64)
    base = 2 * k + 1
    rows = np.arange(n)
    for t in range(c_plus_1):
        from_s = t < rem_s
        # front of s is untouched by tail cancellation while t < rem_s
        s_val = int(s_letters[min(t, slen - 1)]) if slen else 0
        y_col = np.clip(cancel + (t - rem_s), 0, max(ylen - 1, 0))
        y_vals = ys[rows, y_col].astype(np.int64) if ylen else np.zeros(n, np.int64)
        letter = np.where(from_s, s_val, y_vals)
        codes = codes * base + (letter + k)
    return np.where(prod_len >= c_plus_1, codes, -1)


def _worst_multiplicity(codes: np.ndarray) -> int:
    """Max multiplicity of a non-sentinel value within each row; global max."""
    order = np.sort(codes, axis=1)
    n, m = order.shape
    run = np.ones(n, dtype=np.int32)
    best = np.where(order[:, 0] >= 0, 1, 0).astype(np.int32)
    for t in range(1, m):
        same = order[:, t] == order[:, t - 1]
        run = np.where(same, run + 1, 1)
        valid = order[:, t] >= 0
        best = np.maximum(best, np.where(valid, run, 0))
    return int(best.max()) if n else 0


def verify_schottky_exhaustive(
    S: SchottkySet,
    epsilon: float,
    C: int,
    D: float,
    max_len: int,
    rank: int,
    chunk: int = 2_000_000,
) -> VerifyReport:
    """Certify conditions (1)-(2) for all pairs (x, y) with |y| <= max_len
    and x arbitrary, and condition (3) for all s.

    C must be a small integer (the prefix argument works letterwise).
    """
    if C != int(C) or C < 0:
        raise ValueError("exhaustive certification needs integer C >= 0")
    c_plus_1 = int(C) + 1
    elems = [np.array(s.letters, dtype=np.int8) for s in S.elements]
    invs = [np.array(s.inverse().letters, dtype=np.int8) for s in S.elements]
    n_set = len(elems)
    worst1 = worst2 = 0
    pairs = 0
    for level in _levels(rank, max_len):
        for start in range(0, len(level), chunk):
            ys = level[start : start + chunk]
            pairs += len(ys)
            codes1 = np.stack(
                [_prefix_codes(ys, s, c_plus_1, rank) for s in elems], axis=1
            )
            worst1 = max(worst1, _worst_multiplicity(codes1))
            codes2 = np.stack(
                [_prefix_codes(ys, s, c_plus_1, rank) for s in invs], axis=1
            )
            worst2 = max(worst2, _worst_multiplicity(codes2))
    cond3 = all(dist(IDENTITY, s) >= D for s in S.elements)
    return VerifyReport(
        cond1_worst=1 - worst1 / n_set,
        cond2_worst=1 - worst2 / n_set,
        cond3_ok=cond3,
        epsilon=epsilon,
        mode=f"exhaustive y<={max_len}, all x",
        pairs_checked=pairs,
    )


# -- decomposition and alternating walks ------------------------------------


def decompose(mu: Measure, N: int, S: SchottkySet, cap: int = 10**6) -> "AlternatingSpec":
    """Write mu^{*N} = a mu_S^{*2} + (1-a) tau with the largest exact a.

    Requires supp(mu_S^{*2}) inside supp(mu^{*N}) and exact convolution to
    stay under the cap; a = 1 (mu^{*N} equal to mu_S^{*2}) is degenerate.
    """
    mu_n = convolve_power(mu, N, cap=cap)
    mu_s = Measure.uniform(S.elements)
    mu_s2 = convolve(mu_s, mu_s, cap=cap)
    missing = [g for g in mu_s2 if mu_n[g] == 0.0]
    if missing:
        raise ValueError(
            f"supp(mu_S^2) not inside supp(mu^{{*{N}}}): e.g. {word_to_str(missing[0])!r}"
        )
    a = min(mu_n[g] / mu_s2[g] for g in mu_s2)
    if a >= 1.0:
        raise ValueError("degenerate decomposition: a >= 1 (tau would vanish)")
    tau_support = {}
    for g, p in mu_n.items():
        q = (p - a * mu_s2[g]) / (1 - a)
        if q > 1e-15:
            tau_support[g] = q
    total = sum(tau_support.values())
    tau = Measure({g: q / total for g, q in tau_support.items()})
    return AlternatingSpec(kappa_weight=a, tau=tau, schottky=S, N=N)


class KappaTruncationError(RuntimeError):
    """Geometric sampling of a kappa part exceeded the step limit."""


@dataclass(frozen=True)
class AlternatingSpec:
    """Data of an alternating increment law theta = kappa * mu_S^{*2}.

    kappa is the geometric mixture a * sum (1-a)^m tau^{*m}: a kappa draw
    multiplies Geom(a)-many tau increments.  When produced by
    :func:`decompose` the reconstruction identity
    a mu_S^2 + (1-a) tau = mu^{*N} holds exactly.
    """

    kappa_weight: float
    tau: Measure
    schottky: SchottkySet
    N: int

    def __post_init__(self):
        if not 0 < self.kappa_weight < 1:
            raise ValueError("kappa weight must be in (0, 1)")
        if self.N < 1:
            raise ValueError("block length N must be >= 1")

    def kappa_exact(self, tail: float = 1e-12, cap: int = 10**6) -> Measure:
        """Truncated exact law of the kappa part (tail mass below ``tail``)."""
        a = self.kappa_weight
        acc: dict[Word, float] = {}
        power = Measure.point_mass(IDENTITY)
        weight = a
        total = 0.0
        m = 0
        while weight > tail:
            for g, p in power.items():
                acc[g] = acc.get(g, 0.0) + weight * p
            total += weight
            power = convolve(power, self.tau, cap=cap)
            weight *= 1 - a
            m += 1
            if m > 10_000:
                raise RuntimeError("kappa truncation did not converge")
        return Measure({g: p / total for g, p in acc.items()})

    def theta_exact(self, tail: float = 1e-12, cap: int = 10**6) -> Measure:
        """Exact (truncated) alternating increment law kappa * mu_S^{*2}."""
        mu_s = Measure.uniform(self.schottky.elements)
        return convolve(convolve(self.kappa_exact(tail, cap), mu_s, cap=cap), mu_s, cap=cap)

    def to_json_dict(self) -> dict:
        return {
            "kappa_weight": self.kappa_weight,
            "tau": self.tau.to_json_dict(),
            "schottky": self.schottky.to_json_dict(),
            "N": self.N,
        }

    @classmethod
    def from_json_dict(cls, data) -> "AlternatingSpec":
        return cls(
            kappa_weight=float(data["kappa_weight"]),
            tau=Measure.from_json_dict(data["tau"]),
            schottky=SchottkySet.from_json_dict(data["schottky"]),
            N=int(data["N"]),
        )

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "AlternatingSpec":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def canonical_spec(
    k: int = 8, D: int = 102, kappa_weight: float = 0.5, N: int = 2
) -> AlternatingSpec:
    """Default experiment family: canonical Schottky powers with tau the
    simple-random-walk step law on F_k."""
    return AlternatingSpec(
        kappa_weight=kappa_weight,
        tau=Measure.uniform_generators(k),
        schottky=canonical_schottky(k, D),
        N=N,
    )


@dataclass(frozen=True)
class Block:
    """One alternating block: the kappa part preceding s_i = a_i b_i."""

    kappa_part: Word
    a: Word
    b: Word


@dataclass(frozen=True)
class AlternatingPath:
    """Realized walk w_0 s_1 w_1 s_2 ... w_{n-1} s_n w_n.

    ``blocks[i-1]`` holds (w_{i-1}, a_i, b_i); ``tail_kappa`` is w_n, the
    kappa part that the pivot machinery needs to form y_{n+1}^-.
    Derived points follow
        y_i^- = w_0 s_1 ... s_{i-1} w_{i-1},
        y_i   = y_i^- a_i,
        y_i^+ = y_i^- a_i b_i.
    """

    blocks: tuple[Block, ...]
    tail_kappa: Word
    seed: rnglib.SeedRecord

    @property
    def n_blocks(self) -> int:
        return len(self.blocks)

    def increments(self) -> list[Word]:
        """Increments of the theta-walk: g_i = w_{i-1} a_i b_i."""
        return [b.kappa_part * b.a * b.b for b in self.blocks]

    def derived_points(self) -> tuple[list[Word], list[Word], list[Word]]:
        """(y_i^-, y_i, y_i^+) for i = 1..n; materializes full words."""
        y_minus, y_mid, y_plus = [], [], []
        pos = IDENTITY
        for blk in self.blocks:
            ym = pos * blk.kappa_part
            y = ym * blk.a
            yp = y * blk.b
            y_minus.append(ym)
            y_mid.append(y)
            y_plus.append(yp)
            pos = yp
        return y_minus, y_mid, y_plus

    def positions(self) -> list[Word]:
        """theta-walk positions w_0 = e, w_i = y_i^+."""
        pos = [IDENTITY]
        for g in self.increments():
            pos.append(pos[-1] * g)
        return pos

    def final_y_minus(self) -> Word:
        """y_{n+1}^- = w_n-th position times the tail kappa part."""
        return self.positions()[-1] * self.tail_kappa


def sample_alternating(
    spec: AlternatingSpec, n_blocks: int, seed: int, trial: int = 0
) -> AlternatingPath:
    """Draw an alternating path: kappa parts via Geom(a)-many tau steps,
    a_i and b_i uniform on S, all independent; reproducible from
    (seed, trial)."""
    if n_blocks < 0:
        raise ValueError("need n_blocks >= 0")
    a_weight = spec.kappa_weight
    gen_counts = rnglib.stream(seed, trial, 0)
    gen_tau = rnglib.stream(seed, trial, 1)
    gen_s = rnglib.stream(seed, trial, 2)

    counts = gen_counts.geometric(a_weight, size=n_blocks + 1) - 1
    if counts.max(initial=0) > KAPPA_STEP_LIMIT:
        raise KappaTruncationError(
            f"kappa draw asked for more than {KAPPA_STEP_LIMIT} tau steps"
        )
    tau_atoms = list(spec.tau.support.keys())
    tau_probs = np.array([spec.tau[g] for g in tau_atoms])
    tau_probs = tau_probs / tau_probs.sum()
    total_tau = int(counts.sum())
    tau_idx = gen_tau.choice(len(tau_atoms), size=total_tau, p=tau_probs)
    s_idx = gen_s.integers(0, len(spec.schottky), size=2 * n_blocks)

    kappa_parts = []
    at = 0
    for c in counts:
        w = IDENTITY
        for j in range(c):
            w = w * tau_atoms[tau_idx[at + j]]
        kappa_parts.append(w)
        at += c
    elements = spec.schottky.elements
    blocks = tuple(
        Block(kappa_parts[i], elements[s_idx[2 * i]], elements[s_idx[2 * i + 1]])
        for i in range(n_blocks)
    )
    return AlternatingPath(blocks, kappa_parts[-1], rnglib.SeedRecord(seed, trial))
