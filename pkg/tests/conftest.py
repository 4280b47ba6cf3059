import json
from pathlib import Path

import pytest

from rxnparse.entities import load_document

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def two_reaction_json() -> str:
    return (DATA_DIR / "two_reaction_example.json").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def two_reaction_doc(two_reaction_json):
    """A document whose entities carry exactly the example's regions."""
    reactions = json.loads(two_reaction_json)
    entities = []
    counter = 0
    for reaction in reactions:
        for role in ("reactants", "products", "conditions", "arrow"):
            for item in reaction[role]:
                entities.append(
                    {"id": f"e{counter}", "label": item["label"], "bbox": item["bbox"]}
                )
                counter += 1
    return load_document(
        json.dumps({"width": 1400, "height": 300, "entities": entities})
    )
