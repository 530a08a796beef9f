import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # makes oracles importable

from uavfence.ingest import IngestReport, parse_construction_file, parse_osm_xml
from uavfence.store import FeatureStore

DATA_DIR = Path(__file__).parent / "data"

TEST1_LINE = "52.073,-0.627,30,355,8"
TEST2_LINE = "52.080,-0.625,30,355,10"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def campus_features():
    report = IngestReport()
    features = parse_osm_xml((DATA_DIR / "map.xml").read_bytes(), report)
    assert not report.degenerate_ways
    return features


@pytest.fixture()
def campus_store(campus_features) -> FeatureStore:
    return FeatureStore(campus_features)


@pytest.fixture(scope="session")
def campus_config():
    config, warnings = parse_construction_file((DATA_DIR / "fence.cfg").read_text())
    assert not warnings
    return config
