import pathlib

import hypothesis
import pytest

hypothesis.settings.register_profile(
    "suite",
    max_examples=60,
    deadline=None,
    derandomize=True,
)
hypothesis.settings.load_profile("suite")

EXAMPLES = pathlib.Path(__file__).resolve().parent.parent / "src" / "lawbench" / "examples"


@pytest.fixture(scope="session")
def example_dir() -> pathlib.Path:
    return EXAMPLES


def example(name: str) -> str:
    return str(EXAMPLES / name)
