"""Small input checks shared by loaders and estimators."""

import math
import re

import numpy as np
from sklearn.utils.validation import check_array

from .exceptions import InputError, ValidationError

_CODE_RE = re.compile(r"^[A-Z]{3}$")


def check_country_code(code):
    """Return ``code`` upper-cased, or raise if it is not ISO alpha-3 shaped."""
    if not isinstance(code, str):
        raise ValidationError(f"country code must be a string, got {code!r}")
    code = code.strip().upper()
    if not _CODE_RE.match(code):
        raise ValidationError(f"invalid country code {code!r}")
    return code


def check_finite(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a number, got {value!r}") from None
    if not math.isfinite(value):
        raise InputError(f"{name} must be finite, got {value!r}")
    return value


def check_in_range(value, lo, hi, name):
    value = check_finite(value, name)
    if not lo <= value <= hi:
        raise ValidationError(f"{name}={value} outside [{lo}, {hi}]")
    return value


def check_sample(values, name="sample", allow_empty=False):
    """Coerce ``values`` to a finite 1-d float array."""
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        if allow_empty:
            return arr
        raise InputError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} contains NaN or infinite values")
    return arr


def check_column(X, name="X", allow_nan=False):
    """Validate estimator input and return it as a 1-d float array."""
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr.ravel()
    if arr.ndim != 1:
        raise InputError(f"{name} must be 1-d or a single column, got shape {arr.shape}")
    arr = check_array(
        arr.reshape(-1, 1),
        input_name=name,
        ensure_all_finite="allow-nan" if allow_nan else True,
    )
    return arr.ravel()
