import pytest

from classicdl.kb import KnowledgeBase
from classicdl.parsing import parse_description, parse_kb

BASIC_KB_TEXT = """\
# shared test vocabulary
role r
role s
role participants
role wantsToVisit
attribute f
attribute g
attribute h
attribute coach
attribute captain
attribute father
attribute friend
attribute hasPenguins
individual Pat
individual Kim
individual P
individual Q
individual V
individual Arctic
individual Antarctic
"""


@pytest.fixture(scope="session")
def kb() -> KnowledgeBase:
    return parse_kb(BASIC_KB_TEXT)


@pytest.fixture(scope="session")
def parse(kb):
    def go(text: str):
        return parse_description(text, kb)

    return go
