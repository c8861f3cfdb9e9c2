"""OpenStreetMap extraction into routegame scenario files.

Reads OSM XML (a cached extract or a live Overpass download), keeps the
drivable road network inside a bounding box, and writes a scenario document
the primary solver's ``validate`` command accepts. Two-way streets become two
directed arcs sharing one interdiction group; bridge tags propagate onto the
arcs. Interdiction penalties and costs are left as placeholders on purpose:
the primary's ``prepare`` command owns those formulas.
"""

import json
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from urllib import error, parse, request

EARTH_RADIUS_M = 6371008.8
MAX_SNAP_DISTANCE_M = 500.0

# Highway classes a standard road vehicle can use. Everything else (footways,
# cycleways, paths, platforms, ...) is dropped.
DRIVABLE_HIGHWAYS = {
    "motorway", "motorway_link", "trunk", "trunk_link", "primary",
    "primary_link", "secondary", "secondary_link", "tertiary", "tertiary_link",
    "unclassified", "residential", "living_street", "service", "road",
}
IMPLIED_ONEWAY_HIGHWAYS = {"motorway", "motorway_link"}

OVERPASS_URL = "https://overpass-api.de/api/interpreter"
NOMINATIM_URL = "https://nominatim.openstreetmap.org/search"
USER_AGENT = "osm-ingest/0.1 (road-network extraction tool)"


class IngestError(Exception):
    """Base class for ingestion failures."""


class ConfigError(IngestError):
    pass


class DataSourceError(IngestError):
    pass


class EmptyExtractError(IngestError):
    pass


class SnapError(IngestError):
    pass


@dataclass(frozen=True)
class IngestConfig:
    """What to extract and where the route endpoints are.

    ``bbox`` is (south, west, north, east) in degrees. Exactly one of
    ``place`` and ``bbox`` must be given; a ``place`` is resolved to a
    bounding box via geocoding, which needs network access. ``extract``
    points at a cached OSM XML file and replaces the live download.
    """

    start_latlon: tuple[float, float]
    release_latlon: tuple[float, float]
    place: str | None = None
    bbox: tuple[float, float, float, float] | None = None
    budget: int = 4
    network_type: str = "drive"
    extract: Path | None = None

    def __post_init__(self):
        if (self.place is None) == (self.bbox is None):
            raise ConfigError("exactly one of place or bbox must be given")
        if self.network_type != "drive":
            raise ConfigError(f"unsupported network type {self.network_type!r}")
        if self.budget < 0:
            raise ConfigError("budget must be >= 0")
        if self.bbox is not None:
            south, west, north, east = self.bbox
            if not (south < north and west < east):
                raise ConfigError("bbox must be (south, west, north, east)")


def haversine_m(lat1, lon1, lat2, lon2) -> float:
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlmb = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlmb / 2) ** 2
    return 2 * EARTH_RADIUS_M * math.asin(math.sqrt(a))


def _http_get(url: str, timeout: float = 30.0) -> bytes:
    req = request.Request(url, headers={"User-Agent": USER_AGENT})
    try:
        with request.urlopen(req, timeout=timeout) as response:
            return response.read()
    except (error.URLError, OSError, TimeoutError) as exc:
        raise DataSourceError(f"data source unreachable: {exc}") from exc


def geocode_place(place: str) -> tuple[float, float, float, float]:
    """Resolve a place name to (south, west, north, east) via Nominatim."""
    query = parse.urlencode({"q": place, "format": "json", "limit": 1})
    payload = _http_get(f"{NOMINATIM_URL}?{query}")
    results = json.loads(payload)
    if not results:
        raise DataSourceError(f"place not found: {place!r}")
    south, north, west, east = (float(v) for v in results[0]["boundingbox"])
    return south, west, north, east


def fetch_extract(bbox: tuple[float, float, float, float]) -> str:
    """Download raw OSM XML for a bounding box from Overpass."""
    south, west, north, east = bbox
    query = (
        f"[out:xml][timeout:60];"
        f"(way[\"highway\"]({south},{west},{north},{east});>;);out body;"
    )
    payload = _http_get(f"{OVERPASS_URL}?{parse.urlencode({'data': query})}", timeout=90.0)
    return payload.decode("utf-8")


def parse_extract(xml_text: str):
    """(node id -> (lat, lon), list of (tags, ordered node refs)) from OSM XML."""
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise DataSourceError(f"extract is not valid OSM XML: {exc}") from exc
    nodes: dict[int, tuple[float, float]] = {}
    ways: list[tuple[dict[str, str], list[int]]] = []
    for element in root:
        if element.tag == "node":
            nodes[int(element.attrib["id"])] = (
                float(element.attrib["lat"]),
                float(element.attrib["lon"]),
            )
        elif element.tag == "way":
            refs = [int(nd.attrib["ref"]) for nd in element.findall("nd")]
            tags = {t.attrib["k"]: t.attrib["v"] for t in element.findall("tag")}
            ways.append((tags, refs))
    return nodes, ways


def _way_direction(tags: dict[str, str]) -> str:
    """'both', 'forward', or 'backward' for a drivable way."""
    oneway = tags.get("oneway", "").lower()
    if oneway in {"yes", "true", "1"}:
        return "forward"
    if oneway == "-1":
        return "backward"
    if oneway in {"no", "false", "0"}:
        return "both"
    if tags.get("junction") == "roundabout":
        return "forward"
    if tags.get("highway") in IMPLIED_ONEWAY_HIGHWAYS:
        return "forward"
    return "both"


def _is_drivable(tags: dict[str, str]) -> bool:
    if tags.get("area") == "yes":
        return False
    return tags.get("highway") in DRIVABLE_HIGHWAYS


def build_scenario_document(config: IngestConfig, nodes, ways,
                            bbox: tuple[float, float, float, float]) -> dict:
    """Assemble a scenario document from parsed OSM primitives.

    Placeholder P = 0, C = 1, kill_prob = 0 on every edge; the primary's
    ``prepare`` command assigns the real penalties and costs from the tags
    and geometry emitted here.
    """
    south, west, north, east = bbox

    def inside(node_id: int) -> bool:
        lat, lon = nodes[node_id]
        return south <= lat <= north and west <= lon <= east

    edges: list[dict] = []
    used_nodes: set[int] = set()
    next_group = 0
    for tags, refs in ways:
        if not _is_drivable(tags):
            continue
        direction = _way_direction(tags)
        edge_tags = sorted({"bridge"} if tags.get("bridge", "no") != "no" else set())
        for a, b in zip(refs, refs[1:]):
            if a == b or a not in nodes or b not in nodes:
                continue
            if not (inside(a) and inside(b)):
                continue
            length = haversine_m(*nodes[a], *nodes[b])
            if direction == "backward":
                pairs = [(b, a)]
            elif direction == "forward":
                pairs = [(a, b)]
            else:
                pairs = [(a, b), (b, a)]
            for tail, head in pairs:
                edges.append(
                    {
                        "id": len(edges),
                        "tail": tail,
                        "head": head,
                        "T": round(length, 3),
                        "P": 0.0,
                        "C": 1,
                        "group": next_group,
                        "kill_prob": 0.0,
                        "tags": edge_tags,
                    }
                )
            used_nodes.update((a, b))
            next_group += 1
    if not edges:
        raise EmptyExtractError("no drivable ways inside the bounding box")

    def snap(latlon: tuple[float, float], label: str) -> int:
        lat, lon = latlon
        best_node = min(used_nodes, key=lambda n: haversine_m(lat, lon, *nodes[n]))
        distance = haversine_m(lat, lon, *nodes[best_node])
        if distance > MAX_SNAP_DISTANCE_M:
            raise SnapError(
                f"{label} point is {distance:.0f} m from the nearest road node "
                f"(limit {MAX_SNAP_DISTANCE_M:.0f} m); refusing to snap"
            )
        return best_node

    start = snap(config.start_latlon, "start")
    release = snap(config.release_latlon, "release")
    if start == release:
        raise SnapError("start and release snap to the same node")

    reachable = {start}
    outgoing: dict[int, list[int]] = {}
    for edge in edges:
        outgoing.setdefault(edge["tail"], []).append(edge["head"])
    frontier = [start]
    while frontier:
        v = frontier.pop()
        for head in outgoing.get(v, ()):
            if head not in reachable:
                reachable.add(head)
                frontier.append(head)
    if release not in reachable:
        raise EmptyExtractError("release point is not reachable from start in the extract")

    node_records = [
        {"id": nid, "lat": nodes[nid][0], "lon": nodes[nid][1]} for nid in sorted(used_nodes)
    ]
    return {
        "format_version": "1",
        "nodes": node_records,
        "edges": edges,
        "start": start,
        "release": release,
        "budget": config.budget,
        "epsilon": 0.1,
    }


def ingest(config: IngestConfig, out_path) -> Path:
    """Run the full extraction pipeline and write the scenario file."""
    if config.place is not None:
        bbox = geocode_place(config.place)
    else:
        bbox = config.bbox
    for label, (lat, lon) in (("start", config.start_latlon), ("release", config.release_latlon)):
        south, west, north, east = bbox
        if not (south <= lat <= north and west <= lon <= east):
            raise ConfigError(f"{label} point ({lat}, {lon}) lies outside the bounding box")
    if config.extract is not None:
        try:
            xml_text = Path(config.extract).read_text(encoding="utf-8")
        except OSError as exc:
            raise DataSourceError(f"cannot read extract: {exc}") from exc
    else:
        xml_text = fetch_extract(bbox)
    nodes, ways = parse_extract(xml_text)
    document = build_scenario_document(config, nodes, ways, bbox)
    out_path = Path(out_path)
    out_path.write_text(json.dumps(document, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return out_path


def bundled_fixture_path() -> Path:
    """Path of the tiny offline extract shipped for tests and demos."""
    return Path(__file__).parent / "fixtures" / "tiny.osm"
