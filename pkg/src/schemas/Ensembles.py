from schema import Schema, And

Vertices = And([And(int, lambda v: v >= 1)], lambda p: len(p) >= 2,
               error="a path lists at least two 1-based vertices")

Entry = Schema({
    "path": Vertices,
})

Ensemble = Schema(And([Entry], lambda e: len(e) >= 1, error="ensemble must not be empty"))


def validate(data):
    return Ensemble.validate(data)
