"""Finite-support probability measures on group elements, convolution,
path sampling, and entropy estimation.

Entropies are in nats throughout.  Exact convolution is capped because
n-fold convolution supports grow exponentially; past the cap callers are
expected to sample instead.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import rng as rnglib
from .words import IDENTITY, Word, multiply, word_from_str, word_to_str

__all__ = [
    "Measure",
    "ConvolutionCapExceeded",
    "convolve",
    "convolve_power",
    "SamplePath",
    "sample_path",
    "EntropyEstimate",
    "entropy_exact",
    "entropy_empirical",
    "phi",
    "restricted_entropy_demo",
]

SUM_TOLERANCE = 1e-12
DEFAULT_CONVOLUTION_CAP = 10**6


class ConvolutionCapExceeded(RuntimeError):
    """Raised when an exact convolution would exceed the support cap.

    Signals the caller to switch to sampling.
    """


def phi(t: float) -> float:
    """phi(t) = -t log t, with phi(0) = 0."""
    if t < 0:
        raise ValueError("phi needs t >= 0")
    return 0.0 if t == 0 else -t * math.log(t)


class Measure:
    """Finite-support probability measure on reduced words.

    Entries must be positive and sum to 1 within 1e-12 relative
    tolerance; both are validated at construction.
    """

    __slots__ = ("support",)

    def __init__(self, support: Mapping[Word, float]):
        for w, p in support.items():
            if p <= 0:
                raise ValueError(f"non-positive mass {p} at {w!r}")
        total = math.fsum(support.values())
        if not support or abs(total - 1.0) > SUM_TOLERANCE * max(1.0, total):
            raise ValueError(f"masses sum to {total}, not 1")
        self.support = dict(support)

    def __getitem__(self, w: Word) -> float:
        return self.support.get(w, 0.0)

    def __len__(self) -> int:
        return len(self.support)

    def __iter__(self):
        return iter(self.support)

    def items(self):
        return self.support.items()

    def __eq__(self, other) -> bool:
        return isinstance(other, Measure) and self.support == other.support

    def __repr__(self) -> str:
        return f"Measure({len(self.support)} atoms)"

    def allclose(self, other: "Measure", tol: float = SUM_TOLERANCE) -> bool:
        keys = set(self.support) | set(other.support)
        return all(abs(self[w] - other[w]) <= tol for w in keys)

    @classmethod
    def point_mass(cls, w: Word) -> "Measure":
        return cls({w: 1.0})

    @classmethod
    def uniform(cls, elements: Iterable[Word]) -> "Measure":
        elems = list(elements)
        if len(set(elems)) != len(elems):
            raise ValueError("uniform support has repeated elements")
        p = 1.0 / len(elems)
        return cls({w: p for w in elems})

    @classmethod
    def uniform_generators(cls, k: int) -> "Measure":
        """Uniform on the 2k one-letter words of F_k (simple random walk)."""
        return cls.uniform([Word([s * i]) for i in range(1, k + 1) for s in (1, -1)])

    def sample(self, gen: np.random.Generator, size: int) -> list[Word]:
        atoms = list(self.support.keys())
        probs = np.array([self.support[w] for w in atoms])
        probs = probs / probs.sum()
        idx = gen.choice(len(atoms), size=size, p=probs)
        return [atoms[i] for i in idx]

    # -- JSON round trip ---------------------------------------------------

    def to_json_dict(self) -> dict:
        entries = [
            {"word": word_to_str(w), "p": p}
            for w, p in sorted(self.support.items(), key=lambda kv: word_to_str(kv[0]))
        ]
        return {"entries": entries}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "Measure":
        support = {}
        for entry in data["entries"]:
            w = word_from_str(entry["word"])
            if w in support:
                raise ValueError(f"duplicate word {entry['word']!r}")
            support[w] = float(entry["p"])
        return cls(support)

    def save(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "Measure":
        with open(path) as fh:
            return cls.from_json_dict(json.load(fh))


def convolve(
    mu: Measure, nu: Measure, cap: int = DEFAULT_CONVOLUTION_CAP
) -> Measure:
    """(mu * nu)(g) = sum_h mu(h) nu(h^-1 g), exactly, over the product
    support.  Raises ConvolutionCapExceeded if the support would pass cap.

    Per-atom sums use Kahan compensation so that repeated convolutions
    over large supports stay inside the measure's 1e-12 sum invariant.
    """
    out: dict[Word, float] = {}
    comp: dict[Word, float] = {}
    for h, p in mu.items():
        for g, q in nu.items():
            w = multiply(h, g)
            term = p * q - comp.get(w, 0.0)
            total = out.get(w, 0.0)
            fresh = total + term
            comp[w] = (fresh - total) - term
            out[w] = fresh
            if len(out) > cap:
                raise ConvolutionCapExceeded(
                    f"convolution support exceeded cap {cap}; sample instead"
                )
    return Measure(out)


def convolve_power(mu: Measure, n: int, cap: int = DEFAULT_CONVOLUTION_CAP) -> Measure:
    """n-fold convolution mu^{*n}; mu^{*0} is the point mass at e."""
    if n < 0:
        raise ValueError("need n >= 0")
    out = Measure.point_mass(IDENTITY)
    for _ in range(n):
        out = convolve(out, mu, cap=cap)
    return out


@dataclass(frozen=True)
class SamplePath:
    """One realized trajectory w_0 = e, w_i = w_{i-1} g_i."""

    n: int
    increments: tuple[Word, ...]
    positions: tuple[Word, ...]
    seed: rnglib.SeedRecord

    def __post_init__(self):
        assert len(self.increments) == self.n
        assert len(self.positions) == self.n + 1

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["step", "increment", "position"])
            writer.writerow([0, "", word_to_str(self.positions[0])])
            for i in range(1, self.n + 1):
                writer.writerow(
                    [i, word_to_str(self.increments[i - 1]), word_to_str(self.positions[i])]
                )

    @classmethod
    def from_csv(cls, path, seed=rnglib.SeedRecord(0)) -> "SamplePath":
        increments, positions = [], []
        with open(path) as fh:
            reader = csv.DictReader(fh)
            for row in reader:
                if int(row["step"]) > 0:
                    increments.append(word_from_str(row["increment"]))
                positions.append(word_from_str(row["position"]))
        return cls(len(increments), tuple(increments), tuple(positions), seed)


def sample_path(mu: Measure, n: int, seed: int, trial: int = 0) -> SamplePath:
    """Walk of length n with i.i.d. mu increments; fully determined by
    (seed, trial) independent of scheduling."""
    if n < 0:
        raise ValueError("need n >= 0")
    gen = rnglib.stream(seed, trial, 0)
    increments = tuple(mu.sample(gen, n)) if n else ()
    positions = [IDENTITY]
    for g in increments:
        positions.append(positions[-1] * g)
    return SamplePath(n, increments, tuple(positions), rnglib.SeedRecord(seed, trial, 0))


@dataclass(frozen=True)
class EntropyEstimate:
    """Entropy value in nats with its provenance."""

    value: float
    method: str  # exact | plug_in | plug_in_miller_madow
    sample_count: int
    std_error: float = 0.0

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("entropy is non-negative")


def entropy_exact(mu: Measure) -> EntropyEstimate:
    """Shannon entropy of the law itself."""
    h = sum(phi(p) for p in mu.support.values())
    return EntropyEstimate(max(h, 0.0), "exact", 0, 0.0)


def _plug_in_from_counts(counts: np.ndarray, miller_madow: bool) -> float:
    n = counts.sum()
    p = counts[counts > 0] / n
    h = float(-(p * np.log(p)).sum())
    if miller_madow:
        h += (len(p) - 1) / (2 * n)
    return max(h, 0.0)


def entropy_empirical(
    samples: Sequence,
    method: str = "plug_in_miller_madow",
    bootstrap: int = 0,
    seed: int = 0,
) -> EntropyEstimate:
    """Plug-in entropy of the empirical distribution of hashable samples.

    The default applies the Miller-Madow correction (K_hat - 1)/(2N),
    which offsets the downward bias of the plug-in estimator when rare
    atoms are undersampled.  std_error comes from a nonparametric
    bootstrap over the counts when ``bootstrap`` > 0.
    """
    if len(samples) == 0:
        raise ValueError("need at least one sample")
    if method not in ("plug_in", "plug_in_miller_madow"):
        raise ValueError(f"unknown method {method!r}")
    mm = method == "plug_in_miller_madow"
    counter: dict = {}
    for s in samples:
        counter[s] = counter.get(s, 0) + 1
    counts = np.array(list(counter.values()), dtype=np.int64)
    value = _plug_in_from_counts(counts, mm)
    se = 0.0
    if bootstrap > 0:
        gen = rnglib.stream(seed, 0, 0)
        n = int(counts.sum())
        p = counts / n
        reps = np.empty(bootstrap)
        for b in range(bootstrap):
            resampled = gen.multinomial(n, p)
            reps[b] = _plug_in_from_counts(resampled, mm)
        se = float(reps.std(ddof=1)) if bootstrap > 1 else 0.0
    return EntropyEstimate(value, method, len(samples), se)


def restricted_entropy_demo(
    Z_law: Mapping, event_prob: float, seed: int = 0, trials: int = 0
) -> dict:
    """Entropy of the variable that reveals Z only on a rare event.

    Y equals Z on an independent event E with P(E) = event_prob and a
    fixed sentinel label otherwise, so the law of Y is the mixture
    (1 - delta) point mass + delta Z_law.  H(Y) is computed exactly from
    that law; it tends to 0 as delta -> 0.  When ``trials`` > 0 an
    empirical cross-check is included in the report.
    """
    delta = float(event_prob)
    if not (0 < delta <= 1):
        raise ValueError("event probability must be in (0, 1]")
    total = sum(Z_law.values())
    if abs(total - 1.0) > 1e-9:
        raise ValueError("Z law must be a probability distribution")
    sentinel = object()
    if sentinel in Z_law:
        raise ValueError("Z must not take the sentinel label")

    h_y = phi(1 - delta) + sum(phi(delta * p) for p in Z_law.values())
    h_z = sum(phi(p) for p in Z_law.values())
    report = {
        "H_Y": max(h_y, 0.0),
        "H_Z": h_z,
        "event_prob": delta,
        "support_size": len(Z_law),
        # phi-decomposition pieces, for the bound
        # H(Y) <= phi(1-delta) + delta H(Z) + phi(delta) |U|
        "phi_bound": phi(1 - delta) + delta * h_z + phi(delta) * len(Z_law),
    }
    if trials > 0:
        gen = rnglib.stream(seed, 0, 0)
        labels = list(Z_law.keys())
        probs = np.array([Z_law[x] for x in labels])
        probs = probs / probs.sum()
        in_event = gen.random(trials) < delta
        z_idx = gen.choice(len(labels), size=trials, p=probs)
        samples = [
            labels[z_idx[i]] if in_event[i] else "__sentinel__" for i in range(trials)
        ]
        report["H_Y_empirical"] = entropy_empirical(samples).value
    return report
