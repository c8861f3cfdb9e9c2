"""OSM road-network extraction into routegame scenario files."""

from .core import (
    ConfigError,
    DataSourceError,
    EmptyExtractError,
    IngestConfig,
    IngestError,
    SnapError,
    bundled_fixture_path,
    build_scenario_document,
    haversine_m,
    ingest,
    parse_extract,
)

__version__ = "0.1.0"
