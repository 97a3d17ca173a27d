import numpy as np
import pytest

import refdata
from mtdchain import Alphabet, MtdModel, Sequence


@pytest.fixture
def dna():
    return Alphabet(refdata.DNA_SYMBOLS)


@pytest.fixture
def song():
    return Alphabet(refdata.SONG_SYMBOLS)


def build_model(alphabet, params, variant="general"):
    return MtdModel(
        alphabet, 2, 1, params["phi"], [params["pi1"], params["pi2"]], variant=variant
    )


@pytest.fixture
def equiv_model_a(dna):
    return build_model(dna, refdata.EQUIV_A)


@pytest.fixture
def equiv_model_b(dna):
    return build_model(dna, refdata.EQUIV_B)


@pytest.fixture
def pewee_em(song):
    return build_model(song, refdata.PEWEE_EM_PARAMS)


@pytest.fixture
def pewee_berchtold(song):
    return build_model(song, refdata.PEWEE_BERCHTOLD_PARAMS)


@pytest.fixture
def crystallin_em(dna):
    return build_model(dna, refdata.CRYSTALLIN_EM_PARAMS)


def random_sequence(alphabet, length, seed):
    rng = np.random.default_rng(seed)
    return Sequence(alphabet, rng.integers(0, alphabet.size, size=length))
