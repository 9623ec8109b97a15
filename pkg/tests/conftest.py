from pathlib import Path

import pytest

from siphonkit.network import parse_network

CORPUS = Path(__file__).resolve().parent.parent / "corpus"


def load(name: str):
    return parse_network((CORPUS / name).read_text())


@pytest.fixture
def corpus():
    return CORPUS
