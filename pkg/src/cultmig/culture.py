"""Hofstede culture profiles and the cultural distance between countries.

Cultural distance is the plain Euclidean norm of the six dimension
differences; dimensions are not weighted or variance-scaled.
"""

import math
from dataclasses import dataclass, fields, replace

import numpy as np

from .exceptions import ConfigurationError
from .validation import check_country_code, check_in_range

DIMENSIONS = ("pdi", "idv", "mas", "uai", "ltowvs", "ivr")

#: Largest possible distance: every dimension differs by the full scale.
MAX_DISTANCE = 100.0 * math.sqrt(len(DIMENSIONS))


@dataclass(frozen=True)
class CultureProfile:
    """Six dimension scores for one country, each on a 0-100 scale."""

    country: str
    pdi: float
    idv: float
    mas: float
    uai: float
    ltowvs: float
    ivr: float

    def __post_init__(self):
        object.__setattr__(self, "country", check_country_code(self.country))
        for dim in DIMENSIONS:
            value = check_in_range(getattr(self, dim), 0.0, 100.0, f"{self.country}.{dim}")
            object.__setattr__(self, dim, value)

    def as_array(self):
        return np.array([getattr(self, d) for d in DIMENSIONS], dtype=float)


@dataclass(frozen=True)
class CulturalDelta:
    d_pdi: float
    d_idv: float
    d_mas: float
    d_uai: float
    d_ltowvs: float
    d_ivr: float

    def as_tuple(self):
        return tuple(getattr(self, f.name) for f in fields(self))

    def __neg__(self):
        return CulturalDelta(*(-v for v in self.as_tuple()))

    def norm(self):
        return math.sqrt(math.fsum(v * v for v in self.as_tuple()))


@dataclass(frozen=True)
class ProfileOverride:
    """Replace one dimension score of one country."""

    country: str
    dimension: str
    score: float

    def __post_init__(self):
        object.__setattr__(self, "country", check_country_code(self.country))
        if self.dimension not in DIMENSIONS:
            raise ConfigurationError(f"unknown dimension {self.dimension!r}")
        object.__setattr__(
            self, "score", check_in_range(self.score, 0.0, 100.0, "override score")
        )


# Slovakia is published with pdi = mas = 100; corrected values per G. J. Hofstede.
DEFAULT_OVERRIDES = (
    ProfileOverride("SVK", "pdi", 80.0),
    ProfileOverride("SVK", "mas", 60.0),
)


def cultural_delta(a, b):
    """Componentwise difference ``a - b`` of two profiles."""
    return CulturalDelta(*(getattr(a, d) - getattr(b, d) for d in DIMENSIONS))


def cultural_distance(a, b):
    """Unweighted Euclidean distance between two culture profiles.

    >>> usa = CultureProfile("USA", 40, 91, 62, 46, 26, 68)
    >>> aus = CultureProfile("AUS", 38, 90, 61, 51, 21, 71)
    >>> round(cultural_distance(aus, usa), 2)
    8.06
    """
    return cultural_delta(a, b).norm()


def apply_overrides(profiles, overrides=DEFAULT_OVERRIDES):
    """Return a new ``{code: profile}`` mapping with ``overrides`` applied.

    ``profiles`` may be a mapping keyed by country code or any iterable of
    profiles. An override naming a country not present is a configuration
    error rather than a silent no-op.
    """
    if isinstance(profiles, dict):
        out = dict(profiles)
    else:
        out = {p.country: p for p in profiles}
    for ov in overrides:
        if ov.country not in out:
            raise ConfigurationError(
                f"override for {ov.country}.{ov.dimension}: country not in profile set"
            )
        out[ov.country] = replace(out[ov.country], **{ov.dimension: ov.score})
    return out


def profile_matrix(profiles):
    """Stack profiles into ``(codes, X)`` sorted by country code."""
    if isinstance(profiles, dict):
        profiles = profiles.values()
    ordered = sorted(profiles, key=lambda p: p.country)
    codes = [p.country for p in ordered]
    X = np.array([p.as_array() for p in ordered], dtype=float).reshape(len(codes), len(DIMENSIONS))
    return codes, X


def pairwise_cultural_distances(profiles):
    """Square matrix of cultural distances, rows/cols ordered by country code.

    Returns ``(codes, D)``.
    """
    codes, X = profile_matrix(profiles)
    diff = X[:, None, :] - X[None, :, :]
    D = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return codes, D
