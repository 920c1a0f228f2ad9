from enum import Enum


class ModelKind(Enum):
    """Which component evolves.

    PARABOLIC_ELLIPTIC: heat equation in A, nonlocal balance in B (u evolves).
    ELLIPTIC_PARABOLIC: local elliptic problem in A, nonlocal diffusion in B (v evolves).
    """

    PARABOLIC_ELLIPTIC = "parabolic-elliptic"
    ELLIPTIC_PARABOLIC = "elliptic-parabolic"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "-")
        aliases = {"1": "parabolic-elliptic", "model1": "parabolic-elliptic",
                   "2": "elliptic-parabolic", "model2": "elliptic-parabolic"}
        return cls(aliases.get(key, key))


PE = ModelKind.PARABOLIC_ELLIPTIC
EP = ModelKind.ELLIPTIC_PARABOLIC
