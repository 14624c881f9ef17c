"""JSON Schemas for every artifact the CLI writes."""

import importlib.resources
import json

KINDS = (
    "accuracy",
    "bench",
    "dataset_summary",
    "report",
    "selection",
    "stats_summary",
    "trace",
)


def load_schema(kind: str) -> dict:
    if kind not in KINDS:
        raise KeyError(f"unknown schema {kind!r}; available: {', '.join(KINDS)}")
    ref = importlib.resources.files(__package__).joinpath(f"{kind}.schema.json")
    return json.loads(ref.read_text(encoding="utf-8"))
