"""JSON run configuration, initial-data expressions and scenario presets."""
from __future__ import annotations

import ast
import copy
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ParseError
from .kernels import PROFILES, make_kernel
from .mesh import Partition1D, assemble_system
from .models import PE, ModelKind

_FUNCS = {"sin": np.sin, "cos": np.cos, "exp": np.exp}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply,
           ast.Div: np.divide, ast.Pow: np.power}


def _indicator(x, lo, hi):
    return ((x >= lo) & (x <= hi)).astype(float)


def _eval_node(node, x):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, x)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)) \
            and not isinstance(node.value, bool):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id == "x":
            return x
        if node.id in _CONSTS:
            return _CONSTS[node.id]
        raise ValueError(f"unknown name {node.id!r}")
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        val = _eval_node(node.operand, x)
        return -val if isinstance(node.op, ast.USub) else val
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left, x), _eval_node(node.right, x))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
        args = [_eval_node(a, x) for a in node.args]
        name = node.func.id
        if name in _FUNCS and len(args) == 1:
            return _FUNCS[name](args[0])
        if name == "indicator" and len(args) == 2:
            return _indicator(x, args[0], args[1])
        raise ValueError(f"unsupported call {name}() with {len(args)} argument(s)")
    raise ValueError(f"unsupported syntax: {ast.dump(node)[:60]}")


def evaluate_expression(expr: str, x):
    """Evaluate an initial-data expression on the points ``x``.

    Grammar: numbers, ``x``, ``pi``, ``e``, ``+ - * / **``, ``sin``, ``cos``,
    ``exp`` and ``indicator(lo, hi)`` (1 on [lo, hi], 0 elsewhere).
    """
    x = np.asarray(x, dtype=float)
    try:
        tree = ast.parse(expr, mode="eval")
    except SyntaxError as exc:
        raise ValueError(f"cannot parse {expr!r}: {exc.msg}") from None
    with np.errstate(all="raise"):
        try:
            out = _eval_node(tree, x)
        except FloatingPointError as exc:
            raise ValueError(f"{expr!r}: {exc}") from None
    return np.broadcast_to(np.asarray(out, dtype=float), x.shape).copy()


def initial_values(spec, x):
    """Expression string, scalar, or explicit samples -> values on the grid points ``x``."""
    if isinstance(spec, str):
        return evaluate_expression(spec, x)
    if isinstance(spec, (int, float)) and not isinstance(spec, bool):
        return np.full(len(x), float(spec))
    if isinstance(spec, list):
        arr = np.asarray(spec, dtype=float)
        if arr.shape != (len(x),):
            raise ValueError(f"expected {len(x)} samples, got {arr.size}")
        return arr
    raise ValueError("initial data must be an expression, a number or a list of samples")


@dataclass
class RunConfig:
    partition: Partition1D
    J: dict
    G: dict
    nA: int
    nB: int
    model: ModelKind = PE
    T: float = 1.0
    dt: float = 1e-2
    scheme: str = "implicit_euler"
    u0: object = None
    v0: object = None
    trajectory_path: str = "trajectory.csv"
    diagnostics_path: str = "diagnostics.csv"
    snapshot_stride: int = 1
    eps_ladder: list = field(default_factory=lambda: [1e-1, 1e-2, 1e-3])
    t_layer: float | None = None

    def kernels(self):
        return make_kernel(self.J), make_kernel(self.G)

    def system(self, check=True):
        J, G = self.kernels()
        return assemble_system(self.partition, J, G, self.nA, self.nB, check=check)

    def to_dict(self):
        d = {
            "A": list(self.partition.A),
            "B": list(self.partition.B),
            "nA": self.nA,
            "nB": self.nB,
            "kernels": {"J": copy.deepcopy(self.J), "G": copy.deepcopy(self.G)},
            "model": self.model.value,
            "time": {"T": self.T, "dt": self.dt, "scheme": self.scheme},
            "initial": {},
            "outputs": {"trajectory_path": self.trajectory_path,
                        "diagnostics_path": self.diagnostics_path,
                        "snapshot_stride": self.snapshot_stride},
            "epsilon": {"ladder": list(self.eps_ladder), "t_layer": self.t_layer},
        }
        for key in ("u0", "v0"):
            if getattr(self, key) is not None:
                d["initial"][key] = copy.deepcopy(getattr(self, key))
        return d


def serialize(config: RunConfig) -> str:
    return json.dumps(config.to_dict(), indent=2, sort_keys=True)


def _number(d, key, path, positive=False, integer=False):
    if key not in d:
        raise ConfigError(path, "missing")
    val = d[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ConfigError(path, f"expected a number, got {val!r}")
    if integer and int(val) != val:
        raise ConfigError(path, f"expected an integer, got {val!r}")
    if positive and not val > 0:
        raise ConfigError(path, f"must be positive, got {val!r}")
    return int(val) if integer else float(val)


def _interval(d, key):
    val = d.get(key)
    if not (isinstance(val, list) and len(val) == 2
            and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in val)):
        raise ConfigError(key, f"expected [lo, hi], got {val!r}")
    if not val[0] < val[1]:
        raise ConfigError(key, "lo must be below hi")
    return tuple(float(c) for c in val)


def _kernel_spec(d, name):
    path = f"kernels.{name}"
    if not isinstance(d, dict):
        raise ConfigError(path, "missing kernel block")
    if d.get("profile") not in PROFILES:
        raise ConfigError(f"{path}.profile", f"expected one of {PROFILES}")
    _number(d, "radius", f"{path}.radius", positive=True)
    if d["profile"] == "gaussian":
        _number(d, "sigma", f"{path}.sigma", positive=True)
    try:
        make_kernel(d)
    except ValueError as exc:
        raise ConfigError(path, str(exc)) from None
    return copy.deepcopy(d)


def from_dict(raw: dict) -> RunConfig:
    if not isinstance(raw, dict):
        raise ConfigError("<root>", "expected a JSON object")
    A, B = _interval(raw, "A"), _interval(raw, "B")
    if not (A[1] <= B[0] or B[1] <= A[0]):
        raise ConfigError("B", "A and B must be disjoint")
    nA = _number(raw, "nA", "nA", integer=True)
    nB = _number(raw, "nB", "nB", integer=True)
    for key, n in (("nA", nA), ("nB", nB)):
        if n < 2:
            raise ConfigError(key, "need at least 2 cells")
    kernels = raw.get("kernels")
    if not isinstance(kernels, dict):
        raise ConfigError("kernels", "missing")
    J = _kernel_spec(kernels.get("J"), "J")
    G = _kernel_spec(kernels.get("G"), "G")
    try:
        model = ModelKind.parse(raw.get("model", PE.value))
    except ValueError:
        raise ConfigError("model", f"unknown model {raw.get('model')!r}") from None

    time = raw.get("time", {})
    if not isinstance(time, dict):
        raise ConfigError("time", "expected an object")
    T = _number(time, "T", "time.T", positive=True)
    dt = _number(time, "dt", "time.dt", positive=True)
    if dt > T:
        raise ConfigError("time.dt", "dt must not exceed T")
    scheme = time.get("scheme", "implicit_euler")
    if scheme not in ("implicit_euler", "crank_nicolson"):
        raise ConfigError("time.scheme", f"unknown scheme {scheme!r}")

    initial = raw.get("initial", {})
    if not isinstance(initial, dict):
        raise ConfigError("initial", "expected an object")
    probes = {"u0": np.linspace(A[0], A[1], nA), "v0": np.linspace(B[0], B[1], nB)}
    for key in ("u0", "v0"):
        if key in initial and initial[key] is not None:
            try:
                initial_values(initial[key], probes[key])
            except ValueError as exc:
                raise ConfigError(f"initial.{key}", str(exc)) from None
    needed = "u0" if model is PE else "v0"
    if initial.get(needed) is None:
        raise ConfigError(f"initial.{needed}", f"required for the {model.value} model")

    outputs = raw.get("outputs", {})
    stride = outputs.get("snapshot_stride", 1)
    if isinstance(stride, bool) or not isinstance(stride, int) or stride < 1:
        raise ConfigError("outputs.snapshot_stride", "expected a positive integer")
    for key in ("trajectory_path", "diagnostics_path"):
        if key in outputs and not isinstance(outputs[key], str):
            raise ConfigError(f"outputs.{key}", "expected a path string")

    eps = raw.get("epsilon", {})
    ladder = eps.get("ladder", [1e-1, 1e-2, 1e-3])
    if not (isinstance(ladder, list) and len(ladder) >= 3
            and all(isinstance(e, (int, float)) and e > 0 for e in ladder)
            and all(a > b for a, b in zip(ladder, ladder[1:]))):
        raise ConfigError("epsilon.ladder", "expected >= 3 positive, strictly decreasing values")
    t_layer = eps.get("t_layer")
    if t_layer is not None:
        t_layer = _number(eps, "t_layer", "epsilon.t_layer", positive=True)

    return RunConfig(
        partition=Partition1D(A, B), J=J, G=G, nA=nA, nB=nB, model=model,
        T=T, dt=dt, scheme=scheme, u0=initial.get("u0"), v0=initial.get("v0"),
        trajectory_path=outputs.get("trajectory_path", "trajectory.csv"),
        diagnostics_path=outputs.get("diagnostics_path", "diagnostics.csv"),
        snapshot_stride=stride, eps_ladder=[float(e) for e in ladder], t_layer=t_layer,
    )


def parse_config(text: str) -> RunConfig:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"malformed JSON: {exc}") from None
    return from_dict(raw)


PRESETS = {
    "reference": {
        "A": [-1.0, 0.0], "B": [0.0, 1.0], "nA": 64, "nB": 64,
        "kernels": {"J": {"profile": "box", "radius": 1.0}, "G": {"profile": "box", "radius": 1.0}},
        "model": "parabolic-elliptic",
        "time": {"T": 0.5, "dt": 1e-3},
        "initial": {"u0": "cos(pi*x) + 0.5*x"},
    },
    "reference-model2": {
        "A": [-1.0, 0.0], "B": [0.0, 1.0], "nA": 64, "nB": 64,
        "kernels": {"J": {"profile": "box", "radius": 1.0}, "G": {"profile": "box", "radius": 1.0}},
        "model": "elliptic-parabolic",
        "time": {"T": 5.0, "dt": 1e-2},
        "initial": {"v0": "sin(pi*x) + indicator(0.5, 1)"},
    },
    "demo-jump": {
        "A": [-1.0, 0.0], "B": [0.0, 1.0], "nA": 64, "nB": 64,
        "kernels": {"J": {"profile": "box", "radius": 1.0}, "G": {"profile": "tent", "radius": 0.5}},
        "model": "parabolic-elliptic",
        "time": {"T": 0.05, "dt": 1e-3},
        "initial": {"u0": "1 + x"},
    },
    "gap": {
        "A": [-1.0, 0.0], "B": [0.4, 1.0], "nA": 40, "nB": 30,
        "kernels": {"J": {"profile": "box", "radius": 0.5}, "G": {"profile": "tent", "radius": 0.3}},
        "model": "parabolic-elliptic",
        "time": {"T": 0.5, "dt": 1e-3},
        "initial": {"u0": "exp(x)"},
    },
}


def preset(name: str) -> RunConfig:
    if name not in PRESETS:
        raise ConfigError("preset", f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return from_dict(copy.deepcopy(PRESETS[name]))
