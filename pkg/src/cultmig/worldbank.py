"""Client for the World Bank total-population indicator (SP.POP.TOTL).

Raw JSON responses are cached per country; a populated cache lets the
client run offline.
"""

import json
import logging
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import requests

from .exceptions import FetchError, ParseError
from .ingest import POPULATION_YEARS, PopulationSeries

logger = logging.getLogger(__name__)

API_URL = "https://api.worldbank.org/v2/country/{code}/indicator/SP.POP.TOTL"
MAX_WORKERS = 4


def _params(page):
    return {"format": "json", "date": "1995:2015", "per_page": 100, "page": page}


def parse_payload(code, pages):
    """Turn a list of ``[paging, rows]`` payloads into a ``PopulationSeries``."""
    values = {}
    for payload in pages:
        if not isinstance(payload, list):
            raise ParseError(f"{code}: expected a JSON array, got {type(payload).__name__}")
        if len(payload) == 1 and isinstance(payload[0], dict) and "message" in payload[0]:
            raise FetchError(f"{code}: World Bank API error: {payload[0]['message']}")
        if len(payload) != 2 or not isinstance(payload[0], dict):
            raise ParseError(f"{code}: expected [paging, rows], got {len(payload)} element(s)")
        rows = payload[1] or []
        if not isinstance(rows, list):
            raise ParseError(f"{code}: rows element is not a list")
        for row in rows:
            try:
                year = int(row["date"])
                value = row["value"]
            except (KeyError, TypeError, ValueError):
                raise ParseError(f"{code}: malformed row {row!r}") from None
            if value is None or year not in POPULATION_YEARS:
                continue
            values[year] = float(value)
    if not values:
        raise FetchError(f"{code}: no population data returned")
    return PopulationSeries.from_mapping(code, values)


class WorldBankClient:
    """Fetch population series with retries and an on-disk response cache.

    ``session`` only needs a ``get(url, params=..., timeout=...)`` method
    returning an object with ``raise_for_status()`` and ``json()``.
    """

    def __init__(self, cache_dir, session=None, retries=3, backoff=0.5, timeout=30.0,
                 refresh=False):
        self.cache_dir = Path(cache_dir)
        self.session = session if session is not None else requests.Session()
        self.retries = retries
        self.backoff = backoff
        self.timeout = timeout
        self.refresh = refresh

    def _cache_file(self, code):
        return self.cache_dir / f"SP.POP.TOTL_{code}.json"

    def _get(self, code, page):
        url = API_URL.format(code=code)
        delay = self.backoff
        for attempt in range(self.retries + 1):
            try:
                resp = self.session.get(url, params=_params(page), timeout=self.timeout)
                resp.raise_for_status()
                return resp.json()
            except ValueError as exc:
                raise ParseError(f"{code}: response is not JSON ({exc})") from None
            except Exception as exc:  # network layer errors vary by session type
                if attempt == self.retries:
                    raise FetchError(f"{code}: request failed after {attempt + 1} attempt(s): {exc}") from None
                logger.info("retrying %s page %d in %.1fs: %s", code, page, delay, exc)
                time.sleep(delay)
                delay *= 2

    def _download(self, code):
        first = self._get(code, 1)
        pages = [first]
        if isinstance(first, list) and first and isinstance(first[0], dict):
            n_pages = int(first[0].get("pages", 1) or 1)
            pages += [self._get(code, p) for p in range(2, n_pages + 1)]
        return pages

    def fetch_one(self, code):
        cache = self._cache_file(code)
        if cache.exists() and not self.refresh:
            try:
                pages = json.loads(cache.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise ParseError(f"{cache}: corrupt cache file ({exc})") from None
            return parse_payload(code, pages)
        try:
            pages = self._download(code)
        except FetchError:
            if cache.exists():
                logger.warning("%s: fetch failed, serving cached response", code)
                return parse_payload(code, json.loads(cache.read_text(encoding="utf-8")))
            raise
        series = parse_payload(code, pages)
        self.cache_dir.mkdir(parents=True, exist_ok=True)
        cache.write_text(json.dumps(pages, sort_keys=True), encoding="utf-8")
        return series

    def fetch(self, codes):
        codes = sorted(set(codes))
        with ThreadPoolExecutor(max_workers=MAX_WORKERS) as pool:
            results = list(pool.map(self.fetch_one, codes))
        return dict(zip(codes, results))


def fetch_population(codes, cache_dir, session=None, **kwargs):
    """Population series for ``codes`` keyed by country code."""
    return WorldBankClient(cache_dir, session=session, **kwargs).fetch(codes)
