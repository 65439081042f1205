import pathlib

import pytest

from sidl.parser import parse_sidl

GAMES = pathlib.Path(__file__).resolve().parent.parent / "games"


def load_game(name: str):
    return parse_sidl((GAMES / f"{name}.sidl").read_text())


@pytest.fixture(scope="session")
def example1():
    return load_game("example1")


@pytest.fixture(scope="session")
def pico():
    return load_game("pico_turn")


@pytest.fixture(scope="session")
def countdown():
    return load_game("countdown")
