import dataclasses
import json
from enum import Enum

import numpy as np


def complex_pair(value) -> list[float]:
    """Encode a complex scalar as a [re, im] pair of plain floats."""
    z = complex(value)
    # adding 0.0 folds -0.0 into 0.0 so written files stay canonical
    return [float(z.real) + 0.0, float(z.imag) + 0.0]


def pairs_to_array(pairs) -> np.ndarray:
    """Decode nested [re, im] pairs into a complex ndarray."""
    arr = np.asarray(pairs, dtype=float)
    if arr.ndim == 0 or arr.shape[-1] != 2:
        raise ValueError("entries must be [re, im] pairs")
    return arr[..., 0] + 1j * arr[..., 1]


def to_json_primitive(value):
    """Recursively convert value to JSON-serializable primitives."""
    if value is None:
        return None
    if isinstance(value, Enum):
        return to_json_primitive(value.value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return complex_pair(value)
    if isinstance(value, str):
        return value
    if isinstance(value, np.ndarray):
        if np.iscomplexobj(value):
            return to_json_primitive(value.tolist())
        return value.tolist()
    if isinstance(value, (list, tuple, set)):
        return [to_json_primitive(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_json_primitive(v) for k, v in value.items()}
    if dataclasses.is_dataclass(value) and not isinstance(value, type):
        return {f.name: to_json_primitive(getattr(value, f.name)) for f in dataclasses.fields(value)}
    if hasattr(value, "model_dump") and callable(getattr(value, "model_dump")):
        return to_json_primitive(value.model_dump())
    # fallback to string
    return str(value)


def to_json_text(value, indent: int = 2) -> str:
    return json.dumps(to_json_primitive(value), indent=indent, sort_keys=True)
