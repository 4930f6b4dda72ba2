import sys

import pytest

from skg import FieldKind, FieldSchema, Schema, build_snapshot

TOY10 = [
    {"id": "d1", "skills": ["java", "hadoop"], "title": "engineer", "keywords": "senior java engineer"},
    {"id": "d2", "skills": ["java", "hadoop", "spark"], "title": "engineer",
     "keywords": "java software engineer"},
    {"id": "d3", "skills": ["java", "spark"], "title": "engineer"},
    {"id": "d4", "skills": ["java"], "title": "analyst"},
    {"id": "d5", "skills": ["hadoop"], "title": "analyst"},
    {"id": "d6", "skills": ["nursing"], "title": "nurse"},
    {"id": "d7", "skills": ["nursing", "trauma"], "title": "nurse"},
    {"id": "d8", "skills": ["trauma"], "title": "nurse"},
    {"id": "d9", "skills": ["spark"], "title": "engineer"},
    {"id": "d10", "skills": ["excel"], "title": "analyst"},
]


def toy_schema():
    return Schema([
        FieldSchema("skills", FieldKind.EXACT_STRING),
        FieldSchema("title", FieldKind.EXACT_STRING),
        FieldSchema("keywords", FieldKind.ANALYZED_TEXT),
    ])


@pytest.fixture
def schema():
    return toy_schema()


@pytest.fixture(scope="session")
def toy():
    return build_snapshot(TOY10, toy_schema())


@pytest.fixture
def ext(toy):
    """Map a DocSet to its set of external ids."""
    return lambda docs: set(toy.to_external(docs))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n][1])
