from __future__ import annotations

import json
from pathlib import Path

import pytest
from jsonschema import Draft202012Validator

from cli_cases import CASES
from dioph.cli import run

SCHEMAS = Path(__file__).resolve().parent.parent / "schemas"


def load(name: str) -> dict:
    return json.loads((SCHEMAS / name).read_text())


@pytest.mark.parametrize("path", sorted(SCHEMAS.glob("*.schema.json")), ids=lambda p: p.name)
def test_schema_is_valid(path):
    Draft202012Validator.check_schema(json.loads(path.read_text()))


@pytest.mark.parametrize("name", sorted(CASES))
def test_output_matches_schema(name, capsys):
    assert run(CASES[name]) == 0
    doc = json.loads(capsys.readouterr().out)
    Draft202012Validator(load("envelope.schema.json")).validate(doc)
    Draft202012Validator(load("config.schema.json")).validate(doc["config"])
    Draft202012Validator(load(f"{name}.schema.json")).validate(doc["result"])
