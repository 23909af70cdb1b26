"""Check the vendored networks against data/SHA256SUMS, or register a network
that is not vendored.

    python scripts/fetch_datasets.py verify
    python scripts/fetch_datasets.py add NAME SOURCE [--nodes N]

SOURCE is a URL or a local file holding one edge per line, as two node labels
separated by whitespace or a comma. The edges are normalised into
data/NAME.edgelist and its checksum is appended to SHA256SUMS, so later
`verify` runs catch a changed download.
"""

import argparse
import hashlib
import pathlib
import sys
import urllib.request

DATA = pathlib.Path(__file__).resolve().parent.parent / "data"
SUMS = DATA / "SHA256SUMS"


def sha256(path):
    return hashlib.sha256(path.read_bytes()).hexdigest()


def read_sums():
    sums = {}
    if SUMS.exists():
        for line in SUMS.read_text().splitlines():
            if line.strip():
                digest, name = line.split(maxsplit=1)
                sums[name.strip()] = digest
    return sums


def verify():
    bad = 0
    for name, digest in sorted(read_sums().items()):
        path = DATA / name
        if not path.exists():
            print(f"missing  {name}")
            bad += 1
        elif sha256(path) != digest:
            print(f"CHANGED  {name}")
            bad += 1
        else:
            print(f"ok       {name}")
    return 1 if bad else 0


def fetch(source):
    if "://" in source:
        with urllib.request.urlopen(source) as r:
            return r.read().decode("utf-8")
    return pathlib.Path(source).read_text()


def normalise(text, nodes=None):
    edges = set()
    for line in text.splitlines():
        line = line.split("#")[0].replace(",", " ").strip()
        if not line:
            continue
        a, b = line.split()[:2]
        if a == b:
            continue
        edges.add(tuple(sorted((a, b))))
    out = []
    if nodes:
        out.append(f"nodes: {nodes}")
    out.extend(f"{a} {b}" for a, b in sorted(edges))
    return "\n".join(out) + "\n", len(edges)


def add(name, source, nodes):
    text, m = normalise(fetch(source), nodes)
    file = f"{name}.edgelist"
    path = DATA / file
    path.write_text(f"# {name}, from {source}\n" + text)
    sums = read_sums()
    sums[file] = sha256(path)
    SUMS.write_text("".join(f"{d}  {n}\n" for n, d in sorted(sums.items())))
    print(f"{file}: {m} edges, sha256 {sums[file]}")
    return 0


def main(argv):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)
    sub.add_parser("verify")
    a = sub.add_parser("add")
    a.add_argument("name")
    a.add_argument("source")
    a.add_argument("--nodes", type=int, help="declare N nodes so isolates survive")
    args = p.parse_args(argv)
    if args.cmd == "verify":
        return verify()
    return add(args.name, args.source, args.nodes)


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
