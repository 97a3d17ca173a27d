"""Experiment harnesses: order-vs-distance sweeps and BIC comparisons."""

from __future__ import annotations

import numpy as np

from .counts import NGramCounts, count_ngrams
from .em import EmConfig, fit_with_restarts, loglik_from_counts
from .model import FullMarkovModel, random_full_markov, sample_sequence
from .reparam import bic, dim_full_markov, dim_raw_mtd, dim_theta_u
from .stationary import tv_distance, word_distribution


def fit_full_markov(counts: NGramCounts) -> FullMarkovModel:
    """Maximum-likelihood dense table from counts; unseen histories get uniform rows."""
    q = counts.alphabet.size
    m = counts.order
    ws = counts.word_indices()
    table = np.zeros((q**m, q))
    np.add.at(table, (ws // q, ws % q), counts.values().astype(np.float64))
    row_sums = table.sum(axis=1, keepdims=True)
    uniform = np.full(q, 1.0 / q)
    table = np.where(row_sums > 0.0, table / np.where(row_sums == 0.0, 1.0, row_sums), uniform)
    return FullMarkovModel(counts.alphabet, m, table)


def tv_experiment(
    gen_order: int = 5,
    q: int = 4,
    seq_len: int = 5000,
    fit_orders=(2, 3, 4, 5, 6),
    replicates: int = 20,
    word_len: int = 6,
    seed: int = 0,
):
    """Distance between fitted and generating word distributions, per order.

    One random dense order-``gen_order`` chain generates ``replicates``
    sequences of ``seq_len`` letters.  Each sequence is fitted with a
    dense maximum-likelihood model at every order in ``fit_orders`` and
    the total variation distance between the stationary length-
    ``word_len`` word distributions of the fit and of the generator is
    recorded.

    Returns ``(rows, generator)`` where rows are dicts with keys
    ``replicate``, ``fit_order``, ``tv``.
    """
    fit_orders = [int(m) for m in fit_orders]
    root = np.random.SeedSequence(seed)
    gen_seed, *rep_seeds = root.spawn(int(replicates) + 1)
    generator = random_full_markov(q, gen_order, seed=gen_seed)
    target = word_distribution(generator, word_len)
    rows = []
    for r, rep_seed in enumerate(rep_seeds):
        seq = sample_sequence(generator, seq_len, seed=rep_seed)
        for m in fit_orders:
            fitted = fit_full_markov(count_ngrams([seq], m))
            rows.append(
                {
                    "replicate": r,
                    "fit_order": m,
                    "tv": tv_distance(word_distribution(fitted, word_len), target),
                }
            )
    return rows, generator


def tv_experiment_summary(rows) -> dict[int, float]:
    """Mean distance per fitted order."""
    sums: dict[int, list[float]] = {}
    for row in rows:
        sums.setdefault(row["fit_order"], []).append(row["tv"])
    return {m: float(np.mean(v)) for m, v in sorted(sums.items())}


def argmin_orders(rows) -> list[int]:
    """Per replicate, the fitted order with the smallest distance."""
    per_rep: dict[int, dict[int, float]] = {}
    for row in rows:
        per_rep.setdefault(row["replicate"], {})[row["fit_order"]] = row["tv"]
    out = []
    for r in sorted(per_rep):
        tvs = per_rep[r]
        out.append(min(tvs, key=lambda m: (tvs[m], m)))
    return out


def bic_compare(
    sequences,
    orders,
    lag_orders=(1,),
    config: EmConfig | None = None,
    dim_convention: str = "theta_u",
):
    """BIC of the dense model vs the mixture model, per order and lag order.

    Positive ``delta_bic`` (dense minus mixture) means the mixture model
    is preferred.  Counts (and therefore the number of likelihood terms)
    are rebuilt at each order.
    """
    base = config or EmConfig()
    rows = []
    for m in orders:
        counts = count_ngrams(sequences, m)
        n_terms = counts.total
        full = fit_full_markov(counts)
        ll_full = loglik_from_counts(full, counts)
        q = counts.alphabet.size
        bic_full = bic(ll_full, dim_full_markov(m, q), n_terms)
        for l in lag_orders:
            if l > m:
                continue
            cfg = EmConfig(
                epsilon=base.epsilon,
                max_iters=base.max_iters,
                n_restarts=base.n_restarts,
                seed=base.seed,
                floor=base.floor,
                variant=base.variant,
                lag_order=l,
            )
            report = fit_with_restarts(counts, cfg)
            dim = (
                dim_theta_u(m, l, q) if dim_convention == "theta_u" else dim_raw_mtd(m, l, q)
            )
            bic_mtd = bic(report.final_loglik, dim, n_terms)
            rows.append(
                {
                    "order": m,
                    "lag_order": l,
                    "n_terms": n_terms,
                    "loglik_full": ll_full,
                    "dim_full": dim_full_markov(m, q),
                    "bic_full": bic_full,
                    "loglik_mtd": report.final_loglik,
                    "dim_mtd": dim,
                    "bic_mtd": bic_mtd,
                    "delta_bic": bic_full - bic_mtd,
                }
            )
    return rows
