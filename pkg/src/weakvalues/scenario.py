"""
Scenario configuration: JSON parsing, validation, and the built-in catalog.

Complex numbers are written as ``[re, im]`` pairs; a bare number is read as
real. States and operators may be given explicitly or by preset name:

states      up_z down_z up_x down_x up_y down_y, theta_plus theta_minus
            (need ``theta``), top_x top_y top_z (spin-N, need ``N``),
            level:<i> (i-th eigenstate of ``system``)
operators   sigma_x sigma_y sigma_z identity, S_x S_y S_z (need ``N``),
            h_eff (needs ``N`` and ``lambda``); sums like "sigma_x+sigma_z"
"""
import json
from dataclasses import dataclass, field, fields

import numpy as np

from .errors import ParseError, ValidationError
from .hilbert import (DOWN_X, DOWN_Y, DOWN_Z, IDENTITY2, PAULI_X, PAULI_Y, PAULI_Z,
                      UP_X, UP_Y, UP_Z, axis_top_state, eig_hermitian, is_hermitian,
                      spin_operators)

__all__ = ["KINDS", "ScenarioConfig", "Resolved", "parse_scenario", "serialize",
           "resolve", "BUILTIN", "list_builtin", "builtin_config"]

KINDS = ("weakvalue", "impulsive", "weak-ensemble", "postselect",
         "protective", "nonhermitian", "protect2sv", "kaon-toy")

REQUIRED = {
    "weakvalue": ("pre_state", "post_state", "observable"),
    "impulsive": ("pre_state", "observable", "delta"),
    "weak-ensemble": ("pre_state", "observable", "delta"),
    "postselect": ("pre_state", "post_state", "observable", "delta"),
    "protective": ("system", "pre_state", "observable", "delta", "T"),
    "nonhermitian": ("system", "pre_state", "observable", "delta", "T"),
    "protect2sv": ("N", "lambda", "observable", "delta", "T"),
    "kaon-toy": ("epsilon",),
}

# JSON key -> attribute name where they differ
_ALIASES = {"lambda": "lam"}


@dataclass
class ScenarioConfig:
    kind: str
    system: object = "pauli"
    pre_state: object = None
    post_state: object = None
    observable: object = None
    delta: float = None
    T: float = None
    N: int = None
    lam: float = None
    theta: float = None
    epsilon: float = None
    grid: dict = None
    steps: int = None
    samples: int = 10000
    seed: int = 0
    output: str = None

    def to_dict(self):
        out = {}
        for f in fields(self):
            out["lambda" if f.name == "lam" else f.name] = getattr(self, f.name)
        return out


_KEYS = {("lambda" if f.name == "lam" else f.name) for f in fields(ScenarioConfig)}


def _complex(x, where):
    if isinstance(x, bool):
        raise ValidationError(where, "expected a number or [re, im] pair")
    if isinstance(x, (int, float)):
        return [float(x), 0.0]
    if isinstance(x, list) and len(x) == 2 and all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in x):
        return [float(x[0]), float(x[1])]
    raise ValidationError(where, "expected a number or [re, im] pair")


def _canon_vector(value, name):
    if not value:
        raise ValidationError(name, "vector must be nonempty")
    return [_complex(v, name) for v in value]


def _canon_matrix(value, name):
    if not value or not all(isinstance(row, list) for row in value):
        raise ValidationError(name, "matrix must be a nonempty list of rows")
    if any(len(row) != len(value) for row in value):
        raise ValidationError(name, "matrix must be square")
    return [[_complex(v, name) for v in row] for row in value]


def _canon_operator(value, name):
    if isinstance(value, str):
        return value
    if isinstance(value, list) and value and all(isinstance(r, list) for r in value):
        return _canon_matrix(value, name)
    raise ValidationError(name, "expected a preset name or a square matrix")


def _canon_state(value, name):
    if isinstance(value, str):
        return value
    if isinstance(value, list):
        return _canon_vector(value, name)
    raise ValidationError(name, "expected a preset name or a vector")


def _real(value, name, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(name, "expected a number")
    value = float(value)
    if positive and not value > 0:
        raise ValidationError(name, "must be positive")
    return value


def _integer(value, name, minimum=None):
    if isinstance(value, bool) or not isinstance(value, int):
        if isinstance(value, float) and value.is_integer():
            value = int(value)
        else:
            raise ValidationError(name, "expected an integer")
    if minimum is not None and value < minimum:
        raise ValidationError(name, f"must be >= {minimum}")
    return value


def _from_mapping(doc):
    if not isinstance(doc, dict):
        raise ValidationError("<root>", "scenario must be a JSON object")
    unknown = sorted(set(doc) - _KEYS)
    if unknown:
        raise ValidationError(unknown[0], "unknown key")
    kind = doc.get("kind")
    if kind not in KINDS:
        raise ValidationError("kind", f"must be one of {', '.join(KINDS)}")
    for key in REQUIRED[kind]:
        if doc.get(key) is None:
            raise ValidationError(key, f"required for kind={kind}")

    cfg = ScenarioConfig(kind)
    for key, value in doc.items():
        if value is None or key == "kind":
            continue
        if key in ("pre_state", "post_state"):
            value = _canon_state(value, key)
        elif key in ("observable", "system"):
            value = _canon_operator(value, key)
        elif key in ("delta", "T"):
            value = _real(value, key, positive=True)
        elif key in ("lambda", "theta", "epsilon"):
            value = _real(value, key)
        elif key == "N":
            value = _integer(value, key, 1)
        elif key in ("samples", "steps"):
            value = _integer(value, key, 1)
        elif key == "seed":
            value = _integer(value, key, 0)
        elif key == "grid":
            if not isinstance(value, dict) or set(value) - {"M", "L"}:
                raise ValidationError("grid", "expected an object with keys M, L")
            value = {k: (_integer(v, "grid.M", 64) if k == "M" else _real(v, "grid.L", True))
                     for k, v in value.items()}
        elif key == "output":
            if not isinstance(value, str):
                raise ValidationError(key, "expected a path string")
        setattr(cfg, _ALIASES.get(key, key), value)
    if kind == "kaon-toy" and not 0 <= abs(cfg.epsilon) < 1:
        raise ValidationError("epsilon", "must satisfy |epsilon| < 1")
    resolve(cfg)
    return cfg


def parse_scenario(text):
    """Parse and validate a JSON scenario document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    return _from_mapping(doc)


def serialize(cfg):
    return json.dumps(cfg.to_dict(), sort_keys=True)


def config_from_dict(doc):
    return _from_mapping(dict(doc))


# --- preset resolution -------------------------------------------------------

_NAMED_STATES = {"up_z": UP_Z, "down_z": DOWN_Z, "up_x": UP_X, "down_x": DOWN_X,
                 "up_y": UP_Y, "down_y": DOWN_Y}
_PAULI = {"sigma_x": PAULI_X, "sigma_y": PAULI_Y, "sigma_z": PAULI_Z, "identity": IDENTITY2}


def _need(cfg, attr, name, what):
    value = getattr(cfg, attr)
    if value is None:
        raise ValidationError(name, f"required by {what}")
    return value


def _named_operator(term, cfg, field_name):
    if term in _PAULI:
        return _PAULI[term]
    if term in ("S_x", "S_y", "S_z"):
        N = _need(cfg, "N", "N", term)
        return spin_operators(N)["xyz".index(term[-1])]
    if term == "h_eff":
        N, lam = _need(cfg, "N", "N", term), _need(cfg, "lam", "lambda", term)
        return -lam * N * (PAULI_X + PAULI_Y + 1j * PAULI_Z)
    raise ValidationError(field_name, f"unknown operator preset {term!r}")


def _operator(value, cfg, field_name):
    if isinstance(value, str):
        terms = [t.strip() for t in value.split("+")]
        return sum(_named_operator(t, cfg, field_name) for t in terms)
    return np.array([[complex(*v) for v in row] for row in value])


def _state(value, cfg, field_name, hamiltonian=None):
    if not isinstance(value, str):
        return np.array([complex(*v) for v in value])
    if value in _NAMED_STATES:
        return _NAMED_STATES[value]
    if value in ("theta_plus", "theta_minus"):
        th = _need(cfg, "theta", "theta", value)
        sign = 1 if value == "theta_plus" else -1
        return np.array([np.cos(th), sign * np.sin(th)], dtype=complex)
    if value in ("top_x", "top_y", "top_z"):
        N = _need(cfg, "N", "N", value)
        axis = np.eye(3)["xyz".index(value[-1])]
        return axis_top_state(axis, N)
    if value.startswith("level:"):
        if hamiltonian is None or not is_hermitian(hamiltonian):
            raise ValidationError(field_name, "level:<i> needs a hermitian system Hamiltonian")
        try:
            i = int(value.split(":", 1)[1])
            return eig_hermitian(hamiltonian).eigenvectors[:, i]
        except (ValueError, IndexError):
            raise ValidationError(field_name, f"bad level index in {value!r}") from None
    raise ValidationError(field_name, f"unknown state preset {value!r}")


@dataclass
class Resolved:
    hamiltonian: np.ndarray = None
    observable: np.ndarray = None
    pre: np.ndarray = None
    post: np.ndarray = None
    dims: dict = field(default_factory=dict)


def resolve(cfg):
    """Turn presets into arrays and check that all dimensions agree."""
    out = Resolved()
    if cfg.system is not None and cfg.system not in ("pauli", "spin-j"):
        out.hamiltonian = _operator(cfg.system, cfg, "system")
    elif cfg.kind in ("protective", "nonhermitian"):
        raise ValidationError("system", "must be a Hamiltonian (preset expression or matrix)")
    if cfg.observable is not None:
        out.observable = _operator(cfg.observable, cfg, "observable")
    if cfg.pre_state is not None:
        out.pre = _state(cfg.pre_state, cfg, "pre_state", out.hamiltonian)
    if cfg.post_state is not None:
        out.post = _state(cfg.post_state, cfg, "post_state", out.hamiltonian)
    for name, arr in (("system", out.hamiltonian), ("observable", out.observable),
                      ("pre_state", out.pre), ("post_state", out.post)):
        if arr is not None:
            out.dims[name] = arr.shape[0]
    if len(set(out.dims.values())) > 1:
        name = sorted(out.dims)[-1]
        raise ValidationError(name, f"dimensions disagree: {out.dims}")
    if cfg.kind == "protect2sv" and out.observable is not None and out.observable.shape != (2, 2):
        raise ValidationError("observable", "protect2sv measures a spin-1/2 observable (2x2)")
    if cfg.kind == "protective" and not is_hermitian(out.hamiltonian):
        raise ValidationError("system", "protective measurement needs a hermitian Hamiltonian")
    for name, arr in (("pre_state", out.pre), ("post_state", out.post)):
        if arr is not None and np.linalg.norm(arr) == 0:
            raise ValidationError(name, "state must be nonzero")
    return out


# --- built-in catalog --------------------------------------------------------

BUILTIN = {
    "aav-sigma": (
        "weak measurement of sigma_x between <up_y| and |up_x> on a post-selected ensemble",
        {"kind": "postselect", "pre_state": "up_x", "post_state": "up_y",
         "observable": "sigma_x", "delta": 10.0}),
    "anomalous-theta": (
        "post-selected weak value 1/cos(2 theta) far outside the eigenvalue range",
        {"kind": "postselect", "pre_state": "theta_plus", "post_state": "theta_minus",
         "observable": "sigma_z", "theta": 0.75, "delta": 100.0}),
    "ideal-vs-weak": (
        "impulsive readout of sigma_z on (|+1> + |-1>)/sqrt2 with a sharp pointer",
        {"kind": "impulsive", "pre_state": "up_x", "observable": "sigma_z",
         "delta": 0.05, "samples": 10000, "seed": 1}),
    "protective-two-level": (
        "protective measurement of sigma_z in the excited state of sigma_x + sigma_z",
        {"kind": "protective", "system": "sigma_x+sigma_z", "pre_state": "level:1",
         "observable": "sigma_z", "delta": 1.0, "T": 100.0}),
    "spin-protection": (
        "two-state vector <up_y| |up_x> protected by a pre- and post-selected spin N",
        {"kind": "protect2sv", "N": 10, "lambda": 1.0, "observable": "sigma_x",
         "delta": 1.0, "T": 20.0}),
    "decay-postselect": (
        "slow measurement of a decaying two-level system that has not decayed",
        {"kind": "nonhermitian", "system": [[0, 0], [0, [0, -0.1]]],
         "pre_state": [0.6, 0.8], "observable": "sigma_z", "delta": 0.1, "T": 5.0,
         "samples": 10000, "seed": 2}),
    "kaon-toy": (
        "forward/backward eigenstate overlap of a weakly non-orthogonal decaying doublet",
        {"kind": "kaon-toy", "epsilon": 0.1}),
}


def builtin_config(name):
    try:
        return config_from_dict(BUILTIN[name][1])
    except KeyError:
        raise ValidationError("scenario", f"no built-in scenario named {name!r}") from None


def list_builtin():
    width = max(map(len, BUILTIN))
    return "\n".join(f"{name:<{width}}  [{doc['kind']}]  {text}"
                     for name, (text, doc) in BUILTIN.items())


def default_for_kind(kind):
    """Catalog entry used as the base config of a per-kind CLI subcommand."""
    base = {"weakvalue": {"kind": "weakvalue", "pre_state": "up_x", "post_state": "up_y",
                          "observable": "sigma_z"},
            "weak-ensemble": {"kind": "weak-ensemble", "pre_state": "up_z",
                              "observable": "sigma_z", "delta": 10.0}}
    if kind in base:
        return dict(base[kind])
    for _, doc in BUILTIN.values():
        if doc["kind"] == kind:
            return dict(doc)
    raise KeyError(kind)
