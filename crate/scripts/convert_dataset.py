#!/usr/bin/env python3
"""Convert a corresponding-colour table into the `chromadapt eval` layout.

Writes `<out>.csv` with header `sample_id,Xs,Ys,Zs,Xd,Yd,Zd` and the sidecar
`<out>.json`. The source may be a local file or a URL (fetched once and cached
next to the output). Column positions are 0-based and refer to the fields left
after splitting on `--delimiter` (whitespace by default).

Example, for a whitespace table holding `id Xs Ys Zs Xd Yd Zd` after two
header lines:

    scripts/convert_dataset.py raw/lamrigg.txt data/LamRigg \\
        --name LamRigg --scale 0-100 --skip 2 \\
        --id-col 0 --src-cols 1 2 3 --dst-cols 4 5 6 \\
        --src-wp 109.85 100 35.58 --dst-wp 98.07 100 118.23 \\
        --provenance "archived catweb table, file lamrigg.txt"

The historical files were published at
http://colour.derby.ac.uk/colour/info/catweb/ and survive through
web.archive.org snapshots of that site.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
import urllib.request
from pathlib import Path

HEADER = ["sample_id", "Xs", "Ys", "Zs", "Xd", "Yd", "Zd"]


def fetch(source: str, cache_dir: Path) -> str:
    if not re.match(r"^https?://", source):
        return Path(source).read_text(encoding="utf-8", errors="replace")
    cache = cache_dir / ("raw_" + re.sub(r"[^A-Za-z0-9._-]", "_", source.rsplit("/", 1)[-1] or "download"))
    if not cache.exists():
        with urllib.request.urlopen(source, timeout=60) as resp:
            cache.write_bytes(resp.read())
    return cache.read_text(encoding="utf-8", errors="replace")


def split(line: str, delimiter: str | None) -> list[str]:
    if delimiter is None:
        return line.split()
    return next(csv.reader([line], delimiter=delimiter))


def to_xyz(v: list[float], space: str) -> list[float]:
    if space == "xyz":
        return v
    x, y, big_y = v
    if y <= 0:
        raise ValueError(f"chromaticity y must be positive, got {y}")
    return [x * big_y / y, big_y, (1 - x - y) * big_y / y]


def convert(args: argparse.Namespace) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    text = fetch(args.source, out.parent)

    rows = []
    for n, line in enumerate(text.splitlines()[args.skip :], start=1):
        if not line.strip() or (args.comment and line.lstrip().startswith(args.comment)):
            continue
        fields = [f.strip() for f in split(line, args.delimiter)]
        try:
            src = to_xyz([float(fields[i]) for i in args.src_cols], args.space)
            dst = to_xyz([float(fields[i]) for i in args.dst_cols], args.space)
        except (IndexError, ValueError) as e:
            if args.strict:
                print(f"line {n + args.skip}: {e}", file=sys.stderr)
                return 1
            continue
        sid = fields[args.id_col] if args.id_col is not None else str(len(rows) + 1)
        rows.append([sid, *src, *dst])

    if not rows:
        print("no data rows found", file=sys.stderr)
        return 1

    with out.with_suffix(".csv").open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(HEADER)
        for sid, *vals in rows:
            w.writerow([sid, *(repr(float(v)) for v in vals)])

    meta = {
        "name": args.name,
        "scale": args.scale,
        "src_wp": to_xyz(args.src_wp, args.space),
        "dst_wp": to_xyz(args.dst_wp, args.space),
        "source_provenance": args.provenance or args.source,
    }
    out.with_suffix(".json").write_text(json.dumps(meta, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(rows)} pairs to {out.with_suffix('.csv')}", file=sys.stderr)
    return 0


def main(argv: list[str] | None = None) -> int:
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("source", help="input file or http(s) URL")
    p.add_argument("out", help="output path without extension")
    p.add_argument("--name", required=True, help="dataset name used in reports")
    p.add_argument("--scale", choices=["0-1", "0-100"], required=True)
    p.add_argument("--space", choices=["xyz", "xyY"], default="xyz", help="how the columns and white points are given")
    p.add_argument("--src-cols", type=int, nargs=3, required=True)
    p.add_argument("--dst-cols", type=int, nargs=3, required=True)
    p.add_argument("--id-col", type=int)
    p.add_argument("--src-wp", type=float, nargs=3, required=True)
    p.add_argument("--dst-wp", type=float, nargs=3, required=True)
    p.add_argument("--delimiter", help="field separator; whitespace when omitted")
    p.add_argument("--skip", type=int, default=0, help="leading lines to drop")
    p.add_argument("--comment", default="#", help="prefix of lines to ignore")
    p.add_argument("--strict", action="store_true", help="fail on unparsable lines instead of skipping them")
    p.add_argument("--provenance", help="free-text origin recorded in the sidecar")
    return convert(p.parse_args(argv))


if __name__ == "__main__":
    sys.exit(main())
