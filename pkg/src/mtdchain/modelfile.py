"""Versioned JSON model files and plain-text trace files.

One document format covers the three model kinds (``mtd``,
``full_markov``, ``theta_u``).  Matrices are written row-major in
word-index row order.  Probabilities are serialized with Python's
shortest round-tripping float representation, so write -> read -> write
is byte-identical and read values are bit-exact.
"""

from __future__ import annotations

import json

import numpy as np

from .errors import IoError
from .model import Alphabet, FullMarkovModel, MtdModel
from .reparam import ThetaU

FORMAT_VERSION = 1


def _document(model, provenance: dict | None) -> dict:
    doc: dict = {"format_version": FORMAT_VERSION, "alphabet": list(model.alphabet.symbols)}
    if isinstance(model, MtdModel):
        doc["model_kind"] = "mtd"
        doc["m"] = model.order
        doc["l"] = model.lag_order
        doc["variant"] = model.variant
        doc["phi"] = [float(x) for x in model.phi]
        doc["matrices"] = [[[float(x) for x in row] for row in mat] for mat in model.matrices]
    elif isinstance(model, FullMarkovModel):
        doc["model_kind"] = "full_markov"
        doc["m"] = model.order
        doc["l"] = None
        doc["variant"] = None
        doc["phi"] = None
        doc["matrices"] = [[[float(x) for x in row] for row in model.table]]
    elif isinstance(model, ThetaU):
        doc["model_kind"] = "theta_u"
        doc["parametrization"] = "theta_u"
        doc["m"] = model.order
        doc["l"] = model.lag_order
        doc["variant"] = None
        doc["u"] = model.alphabet.symbols[model.u]
        doc["phi"] = None
        doc["matrices"] = [[[float(x) for x in row] for row in t] for t in model.tables]
    else:
        raise TypeError(f"cannot serialize {type(model).__name__}")
    doc["provenance"] = dict(provenance or {})
    return doc


def write_model(path, model, provenance: dict | None = None) -> None:
    """Write a model (MTD, full Markov, or one-block tables) as JSON."""
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_document(model, provenance), fh, indent=2)
        fh.write("\n")


def read_model(path):
    """Read a model file; returns ``(model, provenance)``."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as err:
        raise IoError(f"cannot read model file {path}: {err}") from err
    except json.JSONDecodeError as err:
        raise IoError(f"model file {path} is not valid JSON: {err}") from err
    try:
        version = doc["format_version"]
        if version != FORMAT_VERSION:
            raise IoError(f"unsupported format_version {version!r} in {path}")
        alphabet = Alphabet(tuple(doc["alphabet"]))
        kind = doc["model_kind"]
        mats = [np.array(mat, dtype=np.float64) for mat in doc["matrices"]]
        provenance = doc.get("provenance") or {}
        if kind == "mtd":
            model = MtdModel(
                alphabet, doc["m"], doc["l"], np.array(doc["phi"]), mats,
                variant=doc["variant"],
            )
        elif kind == "full_markov":
            model = FullMarkovModel(alphabet, doc["m"], mats[0])
        elif kind == "theta_u":
            model = ThetaU(alphabet, doc["m"], doc["l"], alphabet.index(doc["u"]), mats)
        else:
            raise IoError(f"unknown model_kind {kind!r} in {path}")
    except KeyError as err:
        raise IoError(f"model file {path} is missing key {err}") from None
    return model, provenance


def write_trace(path, trace) -> None:
    """Write a per-iteration log-likelihood trace as 'iter<TAB>loglik' lines."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("iter\tloglik\n")
        for i, value in enumerate(trace):
            fh.write(f"{i}\t{float(value)!r}\n")
