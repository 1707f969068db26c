from schema import Schema, And, Or, Use

Coordinate = And(Or(int, float), Use(float))

Configuration = Schema(And(
    {
        "dim": And(int, lambda d: d >= 1, error="dim must be a positive integer"),
        "points": And([[Coordinate]], lambda p: len(p) >= 1, error="points must not be empty"),
    },
    lambda c: all(len(point) == c["dim"] for point in c["points"]),
    error="every point needs exactly dim coordinates",
))


def validate(data):
    return Configuration.validate(data)
