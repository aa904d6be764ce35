"""Packaged seed assets: a small authored leveled corpus, its frequency
table, and a scorer calibrated on it.  Regenerate with
scripts/build_seed_assets.py.
"""

from importlib import resources

from leveltext.corpus import Article, load_articles
from leveltext.readability import ScorerModel
from leveltext.textproc import FrequencyTable


def _data(name: str):
    return resources.files("leveltext").joinpath("data").joinpath(name)


def default_freq() -> FrequencyTable:
    with resources.as_file(_data("default_freq.tsv")) as path:
        return FrequencyTable.load(path)


def default_model() -> ScorerModel:
    with resources.as_file(_data("default_model.txt")) as path:
        return ScorerModel.load(path)


def seed_corpus() -> list[Article]:
    with resources.as_file(_data("seed_corpus.jsonl")) as path:
        return load_articles(path)
