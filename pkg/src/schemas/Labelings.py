from schema import Schema, And

from src.schemas.Ensembles import Vertices

Explanation = Schema({
    "value": And(int, lambda i: i >= 0, error="value must be a data index"),
    "path": Vertices,
})

Labeling = Schema([Explanation])


def validate(data):
    return Labeling.validate(data)
