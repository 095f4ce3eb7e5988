#!/usr/bin/env python3
"""Compare the compiled raster core against the pure-numpy fallback.

Equivalent to `inkwash bench`; kept as a standalone script so the numbers
can be reproduced without installing the CLI entry point.
"""

import argparse

from inkwash import BACKEND, available_backends
from inkwash.benchmark import run_benchmark


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--triangles", default="20000,100000",
                        help="comma-separated triangle counts")
    parser.add_argument("--size", default="512x512")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args()

    w, h = (int(t) for t in args.size.lower().split("x"))
    print(f"default backend: {BACKEND}; available: {', '.join(available_backends())}")
    rows = run_benchmark(
        triangle_counts=[int(t) for t in args.triangles.split(",")],
        size=(w, h), workers=args.workers, repeats=args.repeats,
    )
    print(f"{'triangles':>10} {'stage':<12} {'compiled ms':>12} {'python ms':>12} {'speedup':>8}")
    for row in rows:
        speedup = (row["python_ms"] / row["compiled_ms"]
                   if row["compiled_ms"] == row["compiled_ms"] and row["compiled_ms"] else float("nan"))
        print(f"{row['triangles']:>10} {row['stage']:<12} "
              f"{row['compiled_ms']:>12.1f} {row['python_ms']:>12.1f} {speedup:>8.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
