#!/usr/bin/env python3
"""Materialize the bundled demo ontology and course as JSON files.

The demo corpus (9 lessons, 84 segments, one programming-concepts domain) is
generated in code; this writes it out so the CLI and the HTTP service can be
pointed at real files:

    python3 scripts/make_demo_data.py data/
    segsearch search --ontology data/demo_ontology.json \
        --annotations data/demo_course.json \
        --domain structure_de_donnee --concepts pointeur
"""

import argparse
from pathlib import Path

from segsearch.demo import write_demo_data


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument(
        "directory", nargs="?", default="data",
        help="output directory (created if missing, default: data/)",
    )
    args = parser.parse_args()
    written = write_demo_data(Path(args.directory))
    for role, path in sorted(written.items()):
        print(f"{role:9s} {path}")


if __name__ == "__main__":
    main()
