"""Regenerate the bundled capital registry and country-name aliases.

Reads GeoNames country and city tables shipped with ``geonamescache`` and
writes ``src/cultmig/data/capitals.csv`` and ``src/cultmig/data/aliases.csv``.
Run from the repository root::

    pip install geonamescache
    python tools/build_capitals.py
"""

import csv
from pathlib import Path

import geonamescache

OUT_DIR = Path(__file__).resolve().parents[1] / "src" / "cultmig" / "data"

# Countries whose capital is ambiguous. Value: (city name, reason).
PINNED = {
    "NLD": ("Amsterdam", "constitutional capital; government sits in The Hague"),
    "ZAF": ("Pretoria", "executive capital; Cape Town legislative, Bloemfontein judicial"),
    "BOL": ("La Paz", "seat of government; Sucre is the constitutional capital"),
    "CIV": ("Abidjan", "seat of government; Yamoussoukro is the official capital"),
    "BEN": ("Cotonou", "seat of government; Porto-Novo is the official capital"),
    "TZA": ("Dodoma", "official capital and seat of parliament"),
    "LKA": ("Colombo", "executive seat; parliament in Sri Jayawardenepura Kotte"),
    "MYS": ("Kuala Lumpur", "official capital; administration in Putrajaya"),
    "CHE": ("Bern", "federal city"),
    "KAZ": ("Astana", "listed as Nur-Sultan in older sources"),
}

# Names used in the literature that GeoNames spells differently.
EXTRA_ALIASES = {
    "USA": "USA",
    "United States of America": "USA",
    "UK": "GBR",
    "Great Britain": "GBR",
    "Republic of Korea": "KOR",
    "Korea, Republic of": "KOR",
    "Korea South": "KOR",
    "Cabo Verde": "CPV",
    "Cape Verde": "CPV",
    "Czechia": "CZE",
    "Slovak Republic": "SVK",
    "Russian Federation": "RUS",
    "Iran (Islamic Republic of)": "IRN",
    "Viet Nam": "VNM",
    "Netherlands": "NLD",
    "Côte d'Ivoire": "CIV",
    "Cote d'Ivoire": "CIV",
    "North Macedonia": "MKD",
    "Macedonia": "MKD",
    "Trinidad & Tobago": "TTO",
    "Bosnia & Herzegovina": "BIH",
    "Turkiye": "TUR",
    "Türkiye": "TUR",
    "Kyrgyz Republic": "KGZ",
    "Egypt, Arab Rep.": "EGY",
    "Venezuela, RB": "VEN",
    "Hong Kong SAR, China": "HKG",
}


def find_city(cities, iso2, name):
    exact = [c for c in cities if c["countrycode"] == iso2 and c["name"] == name]
    if not exact:
        exact = [
            c for c in cities
            if c["countrycode"] == iso2 and name in c.get("alternatenames", [])
        ]
    if not exact:
        return None
    return max(exact, key=lambda c: c["population"])


def main():
    gc = geonamescache.GeonamesCache()
    countries = gc.get_countries()
    cities = list(gc.get_cities().values())

    rows = []
    aliases = {}
    for iso2, country in sorted(countries.items(), key=lambda kv: kv[1]["iso3"]):
        iso3 = country["iso3"]
        aliases[country["name"]] = iso3
        name, note = PINNED.get(iso3, (country["capital"].strip(), None))
        if not name:
            continue
        city = find_city(cities, iso2, name)
        if city is None:
            continue
        rows.append((iso3, name, city["latitude"], city["longitude"], note))
    aliases.update(EXTRA_ALIASES)

    with open(OUT_DIR / "capitals.csv", "w", newline="", encoding="utf-8") as fh:
        fh.write("# Capital coordinates from GeoNames (via geonamescache).\n")
        fh.write("# Ambiguous capitals are pinned by tools/build_capitals.py:\n")
        for iso3, (name, note) in sorted(PINNED.items()):
            fh.write(f"#   {iso3} {name}: {note}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["country_code", "capital_name", "lat_deg", "lon_deg"])
        for iso3, name, lat, lon, _ in rows:
            writer.writerow([iso3, name, f"{lat:.5f}", f"{lon:.5f}"])

    with open(OUT_DIR / "aliases.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["name", "country_code"])
        for name in sorted(aliases):
            writer.writerow([name, aliases[name]])
    print(f"wrote {len(rows)} capitals, {len(aliases)} aliases")


if __name__ == "__main__":
    main()
