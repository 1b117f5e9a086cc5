"""Capital-to-capital distances on the WGS84 ellipsoid.

The inverse geodesic problem is solved with GeographicLib (Karney's series
expansion plus Newton iteration on the auxiliary sphere), which converges for
every pair of points including nearly antipodal ones.
"""

import csv
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from geographiclib.geodesic import Geodesic

from .exceptions import InputError, UnknownCountryError, ValidationError
from .validation import check_country_code, check_finite


@dataclass(frozen=True)
class GeoPoint:
    """Latitude/longitude in degrees; longitude is folded into [-180, 180)."""

    latitude: float
    longitude: float

    def __post_init__(self):
        lat = check_finite(self.latitude, "latitude")
        lon = check_finite(self.longitude, "longitude")
        if not -90.0 <= lat <= 90.0:
            raise ValidationError(f"latitude {lat} outside [-90, 90]")
        if not -180.0 <= lon <= 180.0:
            raise ValidationError(f"longitude {lon} outside [-180, 180]")
        if lon == 180.0:
            lon = -180.0
        object.__setattr__(self, "latitude", lat)
        object.__setattr__(self, "longitude", lon)


@dataclass(frozen=True)
class Ellipsoid:
    """Reference ellipsoid; ``inverse_flattening=math.inf`` gives a sphere."""

    semi_major_axis: float
    inverse_flattening: float

    def __post_init__(self):
        if not (math.isfinite(self.semi_major_axis) and self.semi_major_axis > 0):
            raise InputError("semi_major_axis must be a positive finite number")
        if not self.inverse_flattening > 1:
            raise InputError("inverse_flattening must exceed 1")

    @property
    def flattening(self):
        return 1.0 / self.inverse_flattening

    @property
    def semi_minor_axis(self):
        return self.semi_major_axis * (1.0 - self.flattening)


WGS84 = Ellipsoid(6378137.0, 298.257223563)


@lru_cache(maxsize=8)
def _solver(ellipsoid):
    return Geodesic(ellipsoid.semi_major_axis, ellipsoid.flattening)


def inverse_geodesic(p1, p2, ellipsoid=WGS84):
    """Length in metres of the shortest geodesic between two points."""
    if not isinstance(p1, GeoPoint):
        p1 = GeoPoint(*p1)
    if not isinstance(p2, GeoPoint):
        p2 = GeoPoint(*p2)
    if p1 == p2:
        return 0.0
    # Fixed argument order keeps the result bit-for-bit symmetric.
    if (p1.latitude, p1.longitude) > (p2.latitude, p2.longitude):
        p1, p2 = p2, p1
    res = _solver(ellipsoid).Inverse(
        p1.latitude, p1.longitude, p2.latitude, p2.longitude, Geodesic.DISTANCE
    )
    return float(res["s12"])


class CapitalRegistry:
    """Mapping from ISO alpha-3 code to the capital's position."""

    def __init__(self, points, names=None):
        self._points = {check_country_code(k): v for k, v in points.items()}
        self._names = dict(names or {})

    def __getitem__(self, code):
        try:
            return self._points[code]
        except KeyError:
            raise UnknownCountryError(f"no capital registered for {code!r}") from None

    def __contains__(self, code):
        return code in self._points

    def __len__(self):
        return len(self._points)

    def __iter__(self):
        return iter(sorted(self._points))

    def __eq__(self, other):
        return isinstance(other, CapitalRegistry) and self._points == other._points

    def name(self, code):
        return self._names.get(code, "")

    def restrict(self, codes):
        codes = set(codes)
        missing = sorted(codes - set(self._points))
        if missing:
            raise ValidationError(f"capitals missing for: {', '.join(missing)}")
        return CapitalRegistry(
            {c: self._points[c] for c in codes},
            {c: self._names.get(c, "") for c in codes},
        )

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["country_code", "capital_name", "lat_deg", "lon_deg"])
            for code in self:
                p = self._points[code]
                writer.writerow([code, self.name(code), repr(p.latitude), repr(p.longitude)])


def capital_distance_km(c1, c2, registry, ellipsoid=WGS84):
    """Geodesic distance in kilometres between the capitals of two countries."""
    return inverse_geodesic(registry[c1], registry[c2], ellipsoid) / 1000.0


def distance_matrix_km(codes, registry, ellipsoid=WGS84):
    """Symmetric matrix of capital distances (km) in the order of ``codes``."""
    n = len(codes)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = capital_distance_km(codes[i], codes[j], registry, ellipsoid)
    return D
