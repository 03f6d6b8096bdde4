#!/usr/bin/env python3
"""Run the HTTP service over the bundled demo corpus.

Writes the demo data to a temporary directory, builds the engine and serves
it — the quickest way to get a live API (plus the web UI, if built) for
manual poking or frontend development:

    python3 scripts/serve_demo.py --port 8000
    curl -s localhost:8000/api/domains | python3 -m json.tool
"""

import argparse
import tempfile
from pathlib import Path

import uvicorn

from segsearch.demo import write_demo_data
from segsearch.engine import build_engine
from segsearch.service import create_app

FRONTEND_DIST = Path(__file__).resolve().parent.parent / "frontend" / "dist"


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--bind", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    parser.add_argument(
        "--static", metavar="DIR",
        help=f"serve this directory at / (default: {FRONTEND_DIST} if it exists)",
    )
    args = parser.parse_args()

    static = args.static
    if static is None and FRONTEND_DIST.is_dir():
        static = str(FRONTEND_DIST)

    with tempfile.TemporaryDirectory(prefix="segsearch-demo-") as tmp:
        written = write_demo_data(tmp)
        engine = build_engine([written["ontology"]], [written["course"]])
        app = create_app(engine, static_dir=static)
        print(f"demo corpus: {len(engine.index.segments)} segments")
        print(f"serving on http://{args.bind}:{args.port}/")
        uvicorn.run(app, host=args.bind, port=args.port, log_level="warning")


if __name__ == "__main__":
    main()
