"""Command-line entry point for the extraction tool.

Exit codes: 0 success, 2 configuration or extraction failure, 4 I/O error.
"""

import argparse
import sys
from pathlib import Path

from .core import IngestConfig, IngestError, ingest


def _parse_latlon(text: str) -> tuple[float, float]:
    try:
        lat, lon = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LAT,LON, got {text!r}")
    return lat, lon


def _parse_bbox(text: str) -> tuple[float, float, float, float]:
    try:
        south, west, north, east = (float(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected SOUTH,WEST,NORTH,EAST, got {text!r}")
    return south, west, north, east


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="osm-ingest",
        description="Extract a drivable OSM road network into a scenario file.",
    )
    region = parser.add_mutually_exclusive_group(required=True)
    region.add_argument("--place", help="place name, resolved via geocoding (needs network)")
    region.add_argument("--bbox", type=_parse_bbox, help="SOUTH,WEST,NORTH,EAST in degrees")
    parser.add_argument("--start", type=_parse_latlon, required=True, metavar="LAT,LON")
    parser.add_argument("--release", type=_parse_latlon, required=True, metavar="LAT,LON")
    parser.add_argument("--budget", type=int, default=4)
    parser.add_argument("--network-type", default="drive")
    parser.add_argument("--extract", type=Path,
                        help="cached OSM XML file; replaces the live download")
    parser.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = IngestConfig(
            start_latlon=args.start,
            release_latlon=args.release,
            place=args.place,
            bbox=args.bbox,
            budget=args.budget,
            network_type=args.network_type,
            extract=args.extract,
        )
        out = ingest(config, args.out)
    except IngestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    print(f"wrote {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
