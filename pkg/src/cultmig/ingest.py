"""Loading and validation of the input tables.

All files are plain CSV with a header row; lines starting with ``#`` are
comments. Loaders sort their output by country code so results never depend
on row order.
"""

import csv
import logging
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .culture import DEFAULT_OVERRIDES, DIMENSIONS, CultureProfile, apply_overrides
from .exceptions import ParseError, UnknownCountryError, ValidationError
from .geodesy import CapitalRegistry, GeoPoint
from .validation import check_country_code

logger = logging.getLogger(__name__)

WAVES = (1995, 2000, 2005, 2010, 2015)
POPULATION_YEARS = range(1995, 2016)
DATA_DIR_ENV = "CULTMIG_DATA_DIR"

N_COUNTRIES = 93
N_OECD = 36

HOFSTEDE_COLUMNS = ("country_code",) + DIMENSIONS
CAPITALS_COLUMNS = ("country_code", "capital_name", "lat_deg", "lon_deg")
STOCK_COLUMNS = ("origin_code", "dest_code", "year", "stock")
POPULATION_COLUMNS = ("country_code", "year", "population")

FILENAMES = {
    "hofstede": "hofstede.csv",
    "capitals": "capitals.csv",
    "stock": "un_stock.csv",
    "population": "population.csv",
    "oecd": "oecd.txt",
}
# Files that fall back to the copy shipped with the package.
BUNDLED = ("capitals", "oecd")


@dataclass(frozen=True)
class StockRecord:
    origin: str
    destination: str
    year: int
    stock: float

    def __post_init__(self):
        if self.origin == self.destination:
            raise ValidationError(f"self-pair stock record for {self.origin}")
        if self.year not in WAVES:
            raise ValidationError(f"year {self.year} is not one of the waves {WAVES}")
        if not (math.isfinite(self.stock) and self.stock >= 0):
            raise ValidationError(
                f"stock {self.stock} for {self.origin}->{self.destination} must be non-negative"
            )


@dataclass(frozen=True)
class PopulationSeries:
    country: str
    values: tuple  # ((year, population), ...) sorted by year

    def __post_init__(self):
        if not self.values:
            raise ValidationError(f"population series for {self.country} is empty")
        for year, pop in self.values:
            if not (math.isfinite(pop) and pop > 0):
                raise ValidationError(f"population of {self.country} in {year} must be positive")

    @classmethod
    def from_mapping(cls, country, mapping):
        return cls(country, tuple(sorted((int(y), float(v)) for y, v in mapping.items())))

    def as_dict(self):
        return dict(self.values)

    @property
    def mean(self):
        """Arithmetic mean over the available years."""
        return math.fsum(v for _, v in self.values) / len(self.values)


@dataclass(frozen=True)
class CorpusStats:
    n_countries: int
    n_oecd: int
    n_non_oecd: int
    n_non_oecd_to_oecd: int
    n_oecd_to_oecd: int

    @property
    def n_flow_pairs(self):
        return self.n_non_oecd_to_oecd + self.n_oecd_to_oecd

    def as_dict(self):
        return {
            "n_countries": self.n_countries,
            "n_oecd": self.n_oecd,
            "n_non_oecd": self.n_non_oecd,
            "n_non_oecd_to_oecd": self.n_non_oecd_to_oecd,
            "n_oecd_to_oecd": self.n_oecd_to_oecd,
            "n_flow_pairs": self.n_flow_pairs,
        }


@dataclass(frozen=True)
class Corpus:
    profiles: dict
    capitals: CapitalRegistry
    stocks: tuple
    populations: dict
    oecd_members: frozenset
    diagnostics: tuple = field(default=(), compare=False)

    @property
    def countries(self):
        return sorted(self.profiles)

    @property
    def non_oecd(self):
        return sorted(set(self.profiles) - self.oecd_members)


def resolve_data_dir(data_dir=None):
    """Explicit argument, then ``$CULTMIG_DATA_DIR``, then ``./data``."""
    if data_dir is not None:
        return Path(data_dir)
    return Path(os.environ.get(DATA_DIR_ENV, "data"))


def bundled_path(name):
    return resources.files("cultmig").joinpath("data", name)


def data_path(kind, data_dir=None):
    """Location of an input file; capitals and OECD list fall back to bundled copies."""
    path = resolve_data_dir(data_dir) / FILENAMES[kind]
    if kind in BUNDLED and not path.exists():
        return Path(str(bundled_path(FILENAMES[kind])))
    return path


def _rows(path, columns):
    with open(path, newline="", encoding="utf-8") as fh:
        lines = (ln for ln in fh if ln.strip() and not ln.lstrip().startswith("#"))
        reader = csv.DictReader(lines)
        header = tuple(h.strip() for h in (reader.fieldnames or ()))
        missing = [c for c in columns if c not in header]
        if missing:
            raise ParseError(f"{path}: missing column(s) {', '.join(missing)}")
        for lineno, row in enumerate(reader, start=2):
            yield lineno, {k.strip(): (v or "").strip() for k, v in row.items() if k}


def _number(text, path, lineno, column):
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"{path}:{lineno}: {column}={text!r} is not a number") from None


def load_hofstede(path):
    """Read culture profiles, excluding countries with incomplete dimensions.

    Returns ``{code: CultureProfile}``. Excluded countries are logged.
    """
    profiles = {}
    for lineno, row in _rows(path, HOFSTEDE_COLUMNS):
        code = check_country_code(row["country_code"])
        if code in profiles:
            raise ValidationError(f"{path}:{lineno}: duplicate country {code}")
        blank = [d for d in DIMENSIONS if row[d] == ""]
        if blank:
            logger.warning("excluding %s: missing %s", code, ", ".join(blank))
            continue
        scores = {d: _number(row[d], path, lineno, d) for d in DIMENSIONS}
        try:
            profiles[code] = CultureProfile(code, **scores)
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
    return dict(sorted(profiles.items()))


def load_capitals(path=None, countries=None):
    """Read the capital registry; with ``countries``, restrict and check coverage."""
    path = path or data_path("capitals")
    points, names = {}, {}
    for lineno, row in _rows(path, CAPITALS_COLUMNS):
        code = check_country_code(row["country_code"])
        if code in points:
            raise ValidationError(f"{path}:{lineno}: duplicate country {code}")
        lat = _number(row["lat_deg"], path, lineno, "lat_deg")
        lon = _number(row["lon_deg"], path, lineno, "lon_deg")
        try:
            points[code] = GeoPoint(lat, lon)
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {code}: {exc}") from None
        names[code] = row["capital_name"]
    registry = CapitalRegistry(points, names)
    if countries is not None:
        registry = registry.restrict(countries)
    return registry


def load_migrant_stock(path, countries=None):
    """Read bilateral stock records, keeping only analysed countries.

    Blank stock cells are treated as a missing wave. Records naming a country
    outside ``countries`` are dropped and counted in the log.
    """
    keep = None if countries is None else set(countries)
    records, dropped = [], 0
    seen = set()
    for lineno, row in _rows(path, STOCK_COLUMNS):
        origin = check_country_code(row["origin_code"])
        dest = check_country_code(row["dest_code"])
        year = int(_number(row["year"], path, lineno, "year"))
        if row["stock"] == "":
            continue
        stock = _number(row["stock"], path, lineno, "stock")
        try:
            rec = StockRecord(origin, dest, year, stock)
        except ValidationError as exc:
            raise ValidationError(f"{path}:{lineno}: {exc}") from None
        if keep is not None and (origin not in keep or dest not in keep):
            dropped += 1
            continue
        key = (origin, dest, year)
        if key in seen:
            raise ValidationError(f"{path}:{lineno}: duplicate record {origin}->{dest} {year}")
        seen.add(key)
        records.append(rec)
    if dropped:
        logger.warning("dropped %d stock records naming countries outside the corpus", dropped)
    records.sort(key=lambda r: (r.origin, r.destination, r.year))
    return records


def load_population(path, countries=None):
    """Read annual populations for 1995-2015 into ``{code: PopulationSeries}``."""
    keep = None if countries is None else set(countries)
    raw = {}
    dropped = set()
    for lineno, row in _rows(path, POPULATION_COLUMNS):
        code = check_country_code(row["country_code"])
        year = int(_number(row["year"], path, lineno, "year"))
        if year not in POPULATION_YEARS or row["population"] == "":
            continue
        pop = _number(row["population"], path, lineno, "population")
        if not pop > 0:
            raise ValidationError(f"{path}:{lineno}: population of {code} in {year} must be positive")
        if keep is not None and code not in keep:
            dropped.add(code)
            continue
        series = raw.setdefault(code, {})
        if year in series:
            raise ValidationError(f"{path}:{lineno}: duplicate population for {code} {year}")
        series[year] = pop
    if dropped:
        logger.warning("dropped population series for %s (not in corpus)", ", ".join(sorted(dropped)))
    return {code: PopulationSeries.from_mapping(code, raw[code]) for code in sorted(raw)}


def write_population_csv(series, path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(POPULATION_COLUMNS)
        for code in sorted(series):
            for year, pop in series[code].values:
                writer.writerow([code, year, repr(pop)])


def load_oecd(path=None):
    path = path or data_path("oecd")
    with open(path, encoding="utf-8") as fh:
        codes = [
            check_country_code(ln) for ln in fh if ln.strip() and not ln.lstrip().startswith("#")
        ]
    if len(set(codes)) != len(codes):
        raise ValidationError(f"{path}: duplicate OECD member codes")
    return frozenset(codes)


def load_aliases():
    aliases = {}
    with bundled_path("aliases.csv").open(encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            aliases[row["name"].casefold()] = row["country_code"]
    return aliases


def resolve_country(name_or_code, known=None):
    """Map an ISO alpha-3 code or an English country name to a code."""
    text = name_or_code.strip()
    code = text.upper()
    if len(code) == 3 and code.isalpha() and (known is None or code in known):
        return code
    alias = load_aliases().get(text.casefold())
    if alias is not None and (known is None or alias in known):
        return alias
    raise UnknownCountryError(f"unknown country {name_or_code!r}")


def load_corpus(data_dir=None, overrides=DEFAULT_OVERRIDES):
    """Load all inputs from ``data_dir`` and apply profile overrides."""
    profiles = load_hofstede(data_path("hofstede", data_dir))
    if overrides is DEFAULT_OVERRIDES:
        # The built-in correction only concerns Slovakia; skip it when absent.
        overrides = [ov for ov in overrides if ov.country in profiles]
    if overrides:
        profiles = dict(sorted(apply_overrides(profiles, overrides).items()))
    codes = list(profiles)
    capitals = load_capitals(data_path("capitals", data_dir), countries=codes)
    stocks = load_migrant_stock(data_path("stock", data_dir), countries=codes)
    populations = load_population(data_path("population", data_dir), countries=codes)
    oecd = load_oecd(data_path("oecd", data_dir))
    return Corpus(profiles, capitals, tuple(stocks), populations, oecd)


def validate_corpus(corpus, n_countries=N_COUNTRIES, n_oecd=N_OECD):
    """Check corpus invariants and count the directed origin->OECD pairs.

    Pass ``None`` for a count to skip that size check.
    """
    problems = []
    codes = set(corpus.profiles)
    if n_countries is not None and len(codes) != n_countries:
        problems.append(f"expected {n_countries} countries, found {len(codes)}")
    if n_oecd is not None and len(corpus.oecd_members) != n_oecd:
        problems.append(f"expected {n_oecd} OECD members, found {len(corpus.oecd_members)}")
    no_profile = sorted(corpus.oecd_members - codes)
    if no_profile:
        problems.append(f"OECD members without a profile: {', '.join(no_profile)}")
    no_capital = sorted(c for c in codes if c not in corpus.capitals)
    if no_capital:
        problems.append(f"countries without a capital: {', '.join(no_capital)}")
    no_pop = sorted(codes - set(corpus.populations))
    if no_pop:
        problems.append(f"countries without a population series: {', '.join(no_pop)}")
    if problems:
        raise ValidationError("invalid corpus: " + "; ".join(problems))
    oecd = len(corpus.oecd_members)
    non = len(codes) - oecd
    return CorpusStats(len(codes), oecd, non, non * oecd, oecd * (oecd - 1))
