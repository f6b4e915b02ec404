"""Regenerates alpine_versions.tsv using the Gentoo-family comparator in the
`univers` package (apk versions follow the same grammar for the subset used
here: numeric components, one letter, _alpha/_beta/_pre/_rc/_p suffixes,
-rN revisions). Run offline; the output is frozen and checked in."""
import pathlib

from univers.versions import AlpineLinuxVersion as V

PAIRS = """
1.24.5-r0 1.24.5-r1
1.24.5-r0 1.24.5-r0
1.24.5-r0 1.25.0-r0
1.21.1-r1 1.24.5-r0
1.0 1.0.1
1.0a 1.0
1.0a 1.0b
1.0a 1.0.1
1.0_rc1 1.0
1.0_alpha1 1.0_beta1
1.0_beta2 1.0_pre1
1.0_pre1 1.0_rc1
1.0_rc1 1.0_rc2
1.0_p1 1.0
1.0_p1 1.0.1
1.0_rc1-r5 1.0-r0
1.0-r10 1.0-r9
2.38.1-r0 2.38.1
3.1.4-r5 3.1.4-r10
1.2.4_p20230717-r4 1.2.4-r4
1.2.4_p20230717 1.2.4_p20220101
6.4_p20231125-r0 6.4_p20230101-r0
1.36.1-r15 1.36.1-r2
3.3.0-r0 3.1.4-r6
1.0_alpha 1.0_alpha1
1.0_rc 1.0
10.0 9.9
1.0.0 1.0
"""


def main():
    rows = []
    for line in PAIRS.strip().splitlines():
        a, b = line.split()
        va, vb = V(a), V(b)
        rel = "<" if va < vb else "=" if va == vb else ">"
        rows.append(f"{a}\t{rel}\t{b}\n")
    out = pathlib.Path(__file__).with_name("alpine_versions.tsv")
    out.write_text("".join(rows))


if __name__ == "__main__":
    main()
