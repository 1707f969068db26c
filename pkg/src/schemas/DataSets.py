from math import isfinite

from schema import Schema, And, Or, Use

Value = And(Or(int, float), Use(float), lambda v: v > 0 and isfinite(v),
            error="Data values must be positive finite numbers")

DataSet = Schema({
    "dim": And(int, lambda d: d >= 1, error="dim must be a positive integer"),
    "bound": And(int, lambda b: b >= 1, error="bound must be a positive integer"),
    "mode": And(str, Use(str.lower), lambda m: m in ("path", "loop"),
                error="mode must be 'path' or 'loop'"),
    "values": [Value],
})


def validate(data):
    return DataSet.validate(data)
