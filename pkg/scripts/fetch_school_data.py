#!/usr/bin/env python3
"""Fetch the public modified-school-calendar meta-analysis dataset
(56 school-level standardized effects in 11 districts) and convert it to
the z-schema CSV consumed by `signbounds bounds`.

The source is the metadat repository's raw CSV (Konstantopoulos 2011
fixed/random-effects example data).  Writes data/school_z.csv with
columns id,z where z = yi / sqrt(vi).

Usage: python scripts/fetch_school_data.py [--out data/school_z.csv]
"""

import argparse
import csv
import io
import math
import sys
import urllib.request

URLS = [
    "https://raw.githubusercontent.com/wviechtb/metadat/master/data-raw/dat.konstantopoulos2011.csv",
    "https://raw.githubusercontent.com/wviechtb/metadat/main/data-raw/dat.konstantopoulos2011.csv",
]


def fetch() -> str:
    last = None
    for url in URLS:
        try:
            with urllib.request.urlopen(url, timeout=30) as resp:
                return resp.read().decode("utf-8")
        except Exception as exc:  # noqa: BLE001 - report and try the next mirror
            last = exc
            print(f"fetch failed from {url}: {exc}", file=sys.stderr)
    raise SystemExit(
        f"could not download the dataset ({last}); if this environment has no network, "
        "obtain dat.konstantopoulos2011 (columns district, school, yi, vi) manually and "
        "rerun with --local <csv>"
    )


def convert(text: str, out_path: str) -> int:
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for row in reader:
        yi = float(row["yi"])
        vi = float(row["vi"])
        rid = f"d{row['district']}_s{row['school']}"
        rows.append((rid, yi / math.sqrt(vi)))
    if len(rows) != 56:
        print(f"warning: expected 56 studies, got {len(rows)}", file=sys.stderr)
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["id", "z"])
        for rid, z in rows:
            writer.writerow([rid, repr(z)])
    return len(rows)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/school_z.csv")
    ap.add_argument("--local", help="use a local copy of the source CSV instead of downloading")
    args = ap.parse_args()
    if args.local:
        with open(args.local, encoding="utf-8") as fh:
            text = fh.read()
    else:
        text = fetch()
    import os

    os.makedirs(os.path.dirname(args.out) or ".", exist_ok=True)
    n = convert(text, args.out)
    print(f"wrote {args.out} ({n} studies)")


if __name__ == "__main__":
    main()
