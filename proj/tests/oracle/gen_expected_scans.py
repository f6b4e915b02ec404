#!/usr/bin/env python3
"""Freeze the expected per-binary findings for the scanner fixtures.

Debian versions are ordered by `dpkg --compare-versions`, Alpine ones by
univers' AlpineLinuxVersion. Package/source pairs come from dpkg_sources.tsv
(dpkg-query output) and from a plain read of the apk installed file.

Output rows: scenario, package, cve.
"""
import json
import re
import subprocess
import sys
from pathlib import Path

import yaml
from univers.versions import AlpineLinuxVersion

HERE = Path(__file__).resolve().parent
FIX = HERE.parent / "fixtures"
KERNEL = re.compile(r"^(linux|linux-signed-.*|linux-lts|linux-edge|linux-virt|linux-headers)$")


def dpkg_gt(a, b):
    return subprocess.run(["dpkg", "--compare-versions", a, "gt", b]).returncode == 0


def apk_gt(a, b):
    return AlpineLinuxVersion(a) > AlpineLinuxVersion(b)


def debian_packages():
    rows = []
    for line in (HERE / "dpkg_sources.tsv").read_text().splitlines():
        name, _ver, _arch, src, srcver = line.split("\t")
        rows.append((name, src, srcver))
    return rows


def alpine_packages():
    rows, cur = [], {}
    for line in (FIX / "alpine" / "installed").read_text().splitlines() + [""]:
        if not line.strip():
            if cur:
                rows.append((cur["P"], cur.get("o", cur["P"]), cur["V"]))
            cur = {}
            continue
        cur.setdefault(line[0], line[2:])
    return rows


def debian_hits(tracker, release, src, srcver, cutoff=None):
    out = set()
    for cve, data in tracker.get(src, {}).items():
        if not cve.startswith("CVE-"):
            continue
        r = data.get("releases", {}).get(release)
        if r is None:
            continue
        if cutoff and int(cve[4:8]) > cutoff:
            continue
        fixed = r.get("fixed_version")
        if fixed == "0" or r.get("urgency") == "unimportant":
            continue
        if r["status"] in ("open", "undetermined"):
            out.add(cve)
        elif r["status"] == "resolved" and fixed and dpkg_gt(fixed, srcver):
            out.add(cve)
    return out


def alpine_hits(secdb, src, ver):
    out = set()
    for item in secdb.get("packages") or []:
        pkg = item["pkg"]
        if pkg["name"] != src:
            continue
        for fixed, ids in (pkg.get("secfixes") or {}).items():
            if str(fixed) == "0":
                continue
            for field in ids:
                for cve in field.split():
                    if cve.startswith("CVE-") and apk_gt(str(fixed), ver):
                        out.add(cve)
    return out


def main():
    rows = []
    tracker = json.loads((FIX / "debian" / "tracker.json").read_text())
    for name, src, srcver in debian_packages():
        for cve in debian_hits(tracker, "bookworm", src, srcver):
            rows.append(("debian-bookworm", name, cve))
            if not KERNEL.match(src):
                rows.append(("debian-bookworm-nokernel", name, cve))
        for cve in debian_hits(tracker, "bookworm", src, srcver, cutoff=2024):
            rows.append(("debian-bookworm-cutoff2024", name, cve))
        for cve in debian_hits(tracker, "bullseye", src, srcver):
            rows.append(("debian-bullseye", name, cve))
    v320 = yaml.safe_load((FIX / "alpine" / "secdb-v3.20-main.yaml").read_text())
    v321 = json.loads((FIX / "alpine" / "secdb-v3.21-main.json").read_text())
    for name, src, ver in alpine_packages():
        for cve in alpine_hits(v320, src, ver):
            rows.append(("alpine-3.20", name, cve))
        for cve in alpine_hits(v321, src, ver):
            rows.append(("alpine-3.21", name, cve))
    with open(HERE / "expected_scans.tsv", "w") as f:
        for r in sorted(rows):
            f.write("\t".join(r) + "\n")
    with open(HERE / "apk_packages.tsv", "w") as f:
        for r in sorted(alpine_packages()):
            f.write("\t".join(r) + "\n")


if __name__ == "__main__":
    sys.exit(main())
