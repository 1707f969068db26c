from schema import Schema, And, Or, Use, Optional

Seeds = Schema({
    "config": int,
    "ensemble": int,
    "shuffle": int,
})

root = Schema(And(
    {
        "points": And(int, lambda n: n >= 3, error="points must be at least 3"),
        "dim": And(int, lambda d: d >= 2, error="dim must be at least 2"),
        "mode": And(str, Use(str.lower), lambda m: m in ("path", "loop"),
                    error="mode must be 'path' or 'loop'"),
        Optional("extra", default=0): And(int, lambda e: e >= 0),
        Optional("max_hops", default=4): And(int, lambda h: h >= 1),
        Optional("bound", default=2): And(int, lambda b: b >= 1),
        Optional("scale", default=1): And(int, lambda s: s >= 1),
        "seeds": Seeds,
        Optional("tol", default=1e-9): And(Or(int, float), Use(float), lambda t: t > 0),
        Optional("rank_strategy", default=None): Or(None, "brute", "reduced", "distinct"),
        Optional("drop", default=0.0): And(Or(int, float), Use(float), lambda p: 0.0 <= p < 1.0),
    },
    lambda spec: spec["points"] >= spec["dim"] + 2,
    error="points must be at least dim + 2",
))


def validate(data):
    return root.validate(data)
