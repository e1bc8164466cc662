"""JSON output with every float written to 17 significant digits."""

import json
import math

import numpy as np


def _enc(obj):
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialize non-finite float {x}")
        s = format(x, ".17g")
        # keep floats recognisable as floats
        return s if any(ch in s for ch in ".en") else s + ".0"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{_enc(str(k))}: {_enc(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_enc(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj):
    return _enc(obj)


def dump(obj, path):
    with open(path, "w") as fh:
        fh.write(dumps(obj) + "\n")
