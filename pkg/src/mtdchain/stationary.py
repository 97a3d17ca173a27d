"""Stationary word distributions and total variation distance."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AlphabetMismatch, ModelTooLarge, NonConvergentStationary
from .model import (
    MAX_TABLE_ENTRIES,
    Alphabet,
    FullMarkovModel,
    full_transition_matrix,
)

_POWER_TOL = 1e-12
_MAX_SWEEPS = 10**5


@dataclass(frozen=True)
class WordDistribution:
    """Dense distribution over all length-k words (word-index order)."""

    alphabet: Alphabet
    word_length: int
    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=np.float64)
        q = self.alphabet.size
        if arr.shape != (q**self.word_length,):
            raise ValueError(f"expected {q**self.word_length} probabilities, got {arr.shape}")
        if abs(arr.sum() - 1.0) > 1e-9:
            raise ValueError(f"word distribution sums to {arr.sum()!r}")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "probs", arr)


def _dense_table(model) -> np.ndarray:
    if isinstance(model, FullMarkovModel):
        return model.table
    return full_transition_matrix(model).table


def stationary_histories(model) -> np.ndarray:
    """Stationary distribution over the q**m history states, by power iteration.

    Iterates mu <- mu T on the expanded chain until the L1 change drops
    to 1e-12 (at most 1e5 sweeps, else :class:`NonConvergentStationary`).
    """
    q = model.alphabet.size
    m = model.order
    table = _dense_table(model)
    n_hist = q**m
    # successor state of history h after letter j: (h mod q**(m-1)) * q + j
    targets = ((np.arange(n_hist) % q ** (m - 1))[:, None] * q + np.arange(q)[None, :]).ravel()
    mu = np.full(n_hist, 1.0 / n_hist)
    for _ in range(_MAX_SWEEPS):
        nxt = np.bincount(targets, weights=(mu[:, None] * table).ravel(), minlength=n_hist)
        if np.abs(nxt - mu).sum() <= _POWER_TOL:
            return nxt
        mu = nxt
    raise NonConvergentStationary(
        f"power iteration did not reach tolerance {_POWER_TOL} in {_MAX_SWEEPS} sweeps"
    )


def word_distribution(model, word_length: int) -> WordDistribution:
    """Distribution of a length-k window under the model's stationary law."""
    q = model.alphabet.size
    m = model.order
    k = int(word_length)
    if k < 1:
        raise ValueError("word_length must be >= 1")
    if q**k > MAX_TABLE_ENTRIES:
        raise ModelTooLarge(f"q**k = {q}**{k} exceeds {MAX_TABLE_ENTRIES} entries")
    mu = stationary_histories(model)
    if k <= m:
        # marginal over the most recent k letters (low digits of the history)
        probs = np.bincount(np.arange(q**m) % q**k, weights=mu, minlength=q**k)
    else:
        table = _dense_table(model)
        probs = mu
        for j in range(m, k):
            rows = table[np.arange(q**j) % q**m]
            probs = (probs[:, None] * rows).ravel()
    return WordDistribution(model.alphabet, k, probs)


def tv_distance(p: WordDistribution, q: WordDistribution) -> float:
    """Total variation distance sum_x |P(x) - Q(x)| (un-halved; range [0, 2])."""
    if p.alphabet != q.alphabet or p.word_length != q.word_length:
        raise AlphabetMismatch("word distributions have different alphabets or lengths")
    return float(np.abs(p.probs - q.probs).sum())
