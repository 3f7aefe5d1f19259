#!/usr/bin/env python3
"""Fetch the public FRED-QD vintage and cut it down to a selection list.

The selection file holds name,code lines (same format the CLI accepts as a
transform sidecar). The output is a panel CSV with the transform row inline,
ready for `bvarfsv fit --config ...`. Needs network access; nothing in the
build or the tests depends on it.
"""

import argparse
import csv
import io
import sys
import urllib.request

DEFAULT_URL = "https://files.stlouisfed.org/files/htdocs/fred-md/quarterly/current.csv"


def quarter_label(mdy: str) -> str:
    month, _, year = mdy.split("/")
    return f"{int(year)}:Q{(int(month) - 1) // 3 + 1}"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--url", default=DEFAULT_URL)
    ap.add_argument("--selection", default="data/fredqd_selection.csv")
    ap.add_argument("--out", default="data/fredqd.csv")
    ap.add_argument("--start", default="", help="drop quarters before this label, e.g. 1965:Q1")
    args = ap.parse_args()

    selection: dict[str, str] = {}
    with open(args.selection, newline="") as f:
        for row in csv.reader(f):
            if row:
                selection[row[0]] = row[1]

    with urllib.request.urlopen(args.url) as resp:
        text = resp.read().decode("utf-8-sig")

    rows = list(csv.reader(io.StringIO(text)))
    header = rows[0]
    keep = [0] + [i for i, name in enumerate(header) if name in selection]
    missing = sorted(set(selection) - set(header))
    if missing:
        print(f"warning: not in the vintage: {', '.join(missing)}", file=sys.stderr)

    out_rows = [["date"] + [header[i] for i in keep[1:]]]
    out_rows.append(["transform"] + [selection[header[i]] for i in keep[1:]])
    for row in rows[1:]:
        # the vintage file carries helper rows (factors/transform flags) whose
        # first cell is not a date
        if "/" not in row[0]:
            continue
        label = quarter_label(row[0])
        if args.start and label < args.start:
            continue
        cells = [row[i] for i in keep[1:]]
        if any(c.strip() == "" for c in cells):
            continue  # the loader rejects missing cells; drop incomplete quarters
        out_rows.append([label] + cells)

    with open(args.out, "w", newline="") as f:
        csv.writer(f).writerows(out_rows)
    print(f"wrote {args.out}: {len(out_rows) - 2} quarters, {len(keep) - 1} series")
    return 0


if __name__ == "__main__":
    sys.exit(main())
