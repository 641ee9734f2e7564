#!/usr/bin/env python3
"""Download the socfb-Stanford3 network used by the replication tests.

The file lands in ./data/socfb-Stanford3.mtx (override with --dest). The
network is published by networkrepository.com; this script needs outbound
internet access.
"""

from __future__ import annotations

import argparse
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

URL = "https://nrvis.com/download/data/socfb/socfb-Stanford3.zip"
MEMBER = "socfb-Stanford3.mtx"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--dest", default="data", help="target directory (default: data)")
    parser.add_argument("--url", default=URL)
    args = parser.parse_args()

    dest = Path(args.dest)
    dest.mkdir(parents=True, exist_ok=True)
    target = dest / MEMBER
    if target.exists():
        print(f"{target} already present")
        return 0

    print(f"fetching {args.url} ...")
    try:
        with urllib.request.urlopen(args.url, timeout=120) as resp:
            payload = resp.read()
    except OSError as exc:
        print(f"download failed: {exc}", file=sys.stderr)
        print("fetch the zip manually from networkrepository.com and unzip "
              f"{MEMBER} into {dest}/", file=sys.stderr)
        return 1

    with zipfile.ZipFile(io.BytesIO(payload)) as zf:
        names = [n for n in zf.namelist() if n.endswith(".mtx")]
        if not names:
            print(f"no .mtx member in archive: {zf.namelist()}", file=sys.stderr)
            return 1
        target.write_bytes(zf.read(names[0]))
    print(f"wrote {target} ({target.stat().st_size} bytes)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
