from __future__ import annotations

from pathlib import Path

import pytest

from mirela import parse_file, resolve_targets
from mirela.classify import ClassifyOptions, classify_pipeline, run_pipeline

SPEC_DIR = Path(__file__).resolve().parent.parent / "specs"


@pytest.fixture(scope="session")
def ex1_spec():
    return resolve_targets(parse_file(SPEC_DIR / "ex1.mirela"))


@pytest.fixture(scope="session")
def ex2_spec():
    return resolve_targets(parse_file(SPEC_DIR / "ex2.mirela"))


def _analyze(spec):
    options = ClassifyOptions(scale="auto", full_formulas=True)
    pipe = run_pipeline(spec, options)
    report = classify_pipeline(pipe, options)
    return pipe, report


@pytest.fixture(scope="session")
def ex1_analysis(ex1_spec):
    """(pipeline, report) for the first example; built once per session."""
    return _analyze(ex1_spec)


@pytest.fixture(scope="session")
def ex2_analysis(ex2_spec):
    return _analyze(ex2_spec)
