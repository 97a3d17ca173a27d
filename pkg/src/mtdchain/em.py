"""EM estimation of MTD models from (m+1)-gram counts.

The model is treated as a mixture indexed by a hidden lag selector: the
selector picks component g with probability phi_g and the next letter is
then drawn from pi_g conditioned on the lag-g block alone.  The E-step
posterior of the selector given an observed (m+1)-word does not depend
on the word's position, so one pass over the distinct observed words
(weighted by their counts) is a full E-step, and the M-step is closed
form.  Each E+M pair cannot decrease the conditional log-likelihood.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .counts import NGramCounts, lag_contingency
from .errors import AllRestartsFailed, DegenerateLikelihood, EmptyCorpus, ShapeMismatch
from .model import (
    MtdModel,
    _lag_blocks,
    component_word_probs,
    random_mtd,
    spell_word,
    word_probabilities,
)
from .reparam import ThetaU, bic, model_dimension, to_theta_u


@dataclass
class EmConfig:
    """Knobs for :func:`em_fit` and :func:`fit_with_restarts`.

    ``epsilon`` is the stopping threshold on the absolute log-likelihood
    increase; ``n_restarts`` counts one contingency-table initialization
    plus uniform-random ones; ``floor``, when set, bounds every mixture
    component weight below before posterior normalization instead of
    aborting on a degenerate word.
    """

    epsilon: float = 1e-3
    max_iters: int = 1000
    n_restarts: int = 5
    seed: int = 0
    floor: float | None = None
    variant: str = "general"
    lag_order: int = 1

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


class PosteriorTable:
    """Per observed word, the posterior over which lag emitted its last letter."""

    def __init__(self, word_indices: np.ndarray, probs: np.ndarray):
        self.word_indices = word_indices
        self.probs = probs  # shape (n_words, G)

    def __getitem__(self, word: int) -> np.ndarray:
        pos = np.searchsorted(self.word_indices, word)
        if pos >= len(self.word_indices) or self.word_indices[pos] != word:
            raise KeyError(word)
        return self.probs[pos]

    def items(self):
        return zip(self.word_indices, self.probs)


@dataclass
class FitReport:
    """Outcome of one fit: parameters, trace, and selection scores."""

    model: MtdModel
    loglik_trace: np.ndarray
    final_loglik: float
    iterations: int
    converged: bool
    restart_index: int | None
    theta_u: ThetaU
    bic: float


def loglik_from_counts(model, counts: NGramCounts) -> float:
    """Conditional log-likelihood sum_w N(w) log p(w); -inf if any p(w) = 0."""
    probs = word_probabilities(model, counts.word_indices())
    if (probs <= 0.0).any():
        return float("-inf")
    return float(counts.values() @ np.log(probs))


def e_step(model: MtdModel, counts: NGramCounts, floor: float | None = None) -> PosteriorTable:
    """Posterior lag probabilities for every observed word.

    Raises :class:`DegenerateLikelihood` if an observed word has zero
    mixture probability, unless ``floor`` bounds the component weights
    below first.
    """
    if counts.word_length != model.order + 1:
        raise ShapeMismatch(
            f"counts are over {counts.word_length}-words, model needs {model.order + 1}"
        )
    comps = component_word_probs(model, counts.word_indices())
    if floor is not None:
        comps = np.maximum(comps, floor)
    denom = comps.sum(axis=0)
    if (denom <= 0.0).any():
        pos = int(np.argmax(denom <= 0.0))
        w = int(counts.word_indices()[pos])
        raise DegenerateLikelihood(
            f"observed word {spell_word(w, counts.word_length, counts.alphabet)!r} "
            f"(index {w}) has zero probability under the current model",
            word_index=w,
            word=spell_word(w, counts.word_length, counts.alphabet),
        )
    return PosteriorTable(counts.word_indices(), (comps / denom).T)


def m_step(posteriors: PosteriorTable, counts: NGramCounts, model: MtdModel):
    """Closed-form maximizer of the expected complete-data log-likelihood.

    Returns ``(phi, matrices)``.  A matrix row whose posterior-weighted
    block count is zero is copied from ``model`` unchanged: any
    stochastic row is optimal there, and keeping the previous iterate
    preserves determinism and monotonicity.
    """
    q = model.alphabet.size
    l = model.lag_order
    G = model.n_components
    ws = posteriors.word_indices
    N = counts.values() if ws is counts.word_indices() else np.array(
        [counts[int(w)] for w in ws], dtype=np.int64
    )
    weighted = posteriors.probs * N[:, None]  # (n_words, G)
    phi = weighted.sum(axis=0) / counts.total
    i0 = ws % q
    if model.variant == "single_matrix":
        num = np.zeros((q, q))
        for g in range(1, G + 1):
            np.add.at(num, (_lag_blocks(ws, g, 1, q), i0), weighted[:, g - 1])
        matrices = [_normalize_rows(num, model.matrices[0])]
    else:
        matrices = []
        for g in range(1, G + 1):
            num = np.zeros((q**l, q))
            np.add.at(num, (_lag_blocks(ws, g, l, q), i0), weighted[:, g - 1])
            matrices.append(_normalize_rows(num, model.matrices[g - 1]))
    return phi, matrices


def _normalize_rows(num: np.ndarray, previous: np.ndarray) -> np.ndarray:
    row_sums = num.sum(axis=1)
    out = np.where(row_sums[:, None] > 0.0, num / np.where(row_sums == 0.0, 1.0, row_sums)[:, None], previous)
    return out


def init_contingency(counts: NGramCounts, lag_order: int = 1, variant: str = "general") -> MtdModel:
    """Starting point from lag contingency tables with +1 pseudocounts.

    phi starts uniform; every matrix entry is strictly positive.
    """
    if len(counts) == 0:
        raise EmptyCorpus("cannot initialize from empty counts")
    m = counts.order
    G = m - lag_order + 1
    if variant == "single_matrix":
        pooled = sum(lag_contingency(counts, g, lag_order).table for g in range(1, G + 1))
        mats = [_pseudocount_rows(pooled)]
    else:
        mats = [
            _pseudocount_rows(lag_contingency(counts, g, lag_order).table)
            for g in range(1, G + 1)
        ]
    phi = np.full(G, 1.0 / G)
    return MtdModel(counts.alphabet, m, lag_order, phi, mats, variant=variant)


def _pseudocount_rows(table: np.ndarray) -> np.ndarray:
    smoothed = table.astype(np.float64) + 1.0
    return smoothed / smoothed.sum(axis=1, keepdims=True)


def init_random(q, order, lag_order, variant="general", seed=0, alphabet=None) -> MtdModel:
    """Uniform-random starting point (delegates to :func:`random_mtd`)."""
    return random_mtd(q, order, lag_order, variant=variant, seed=seed, alphabet=alphabet)


def _make_report(model, trace, converged, restart_index, counts) -> FitReport:
    trace = np.asarray(trace, dtype=np.float64)
    theta = to_theta_u(model, 0)
    return FitReport(
        model=model,
        loglik_trace=trace,
        final_loglik=float(trace[-1]),
        iterations=len(trace) - 1,
        converged=converged,
        restart_index=restart_index,
        theta_u=theta,
        bic=bic(float(trace[-1]), model_dimension(model), counts.total),
    )


def em_fit(counts: NGramCounts, init: MtdModel, config: EmConfig | None = None) -> FitReport:
    """Alternate E and M steps from ``init`` until the increase drops below epsilon.

    The trace records the conditional log-likelihood of every iterate,
    starting with ``init`` itself.  A degenerate E-step aborts the run;
    the partial trace is attached to the raised error.
    """
    config = config or EmConfig()
    model = init
    trace = [loglik_from_counts(model, counts)]
    converged = False
    for _ in range(config.max_iters):
        try:
            posteriors = e_step(model, counts, floor=config.floor)
        except DegenerateLikelihood as err:
            err.trace = np.asarray(trace)
            raise
        phi, matrices = m_step(posteriors, counts, model)
        model = MtdModel(
            model.alphabet, model.order, model.lag_order, phi, matrices, variant=model.variant
        )
        trace.append(loglik_from_counts(model, counts))
        if trace[-1] - trace[-2] < config.epsilon:
            converged = True
            break
    return _make_report(model, trace, converged, None, counts)


def fit_with_restarts(counts: NGramCounts, config: EmConfig | None = None) -> FitReport:
    """Best of one contingency-initialized run plus random restarts.

    Restart 0 starts from :func:`init_contingency`; restarts 1..n-1 start
    from seeded uniform-random models.  Returns the report with the
    highest final log-likelihood (ties: lowest restart index).
    """
    config = config or EmConfig()
    if config.n_restarts < 1:
        raise ValueError("n_restarts must be >= 1")
    q = counts.alphabet.size
    seeds = np.random.SeedSequence(config.seed).spawn(max(config.n_restarts - 1, 0))
    best = None
    failures = []
    for r in range(config.n_restarts):
        if r == 0:
            init = init_contingency(counts, config.lag_order, config.variant)
        else:
            init = init_random(
                q,
                counts.order,
                config.lag_order,
                variant=config.variant,
                seed=seeds[r - 1],
                alphabet=counts.alphabet,
            )
        try:
            report = em_fit(counts, init, config)
        except DegenerateLikelihood as err:
            failures.append((r, err))
            continue
        report.restart_index = r
        if best is None or report.final_loglik > best.final_loglik:
            best = report
    if best is None:
        raise AllRestartsFailed(
            f"all {config.n_restarts} restarts hit a degenerate likelihood",
            failures=failures,
        )
    return best
