"""Session fixtures: the expensive preset runs, executed once and shared."""

import pytest

from kppfronts.cli import parse_config
from kppfronts import harness


def _config(preset, experiment, outdir, **extra):
    overrides = {"preset": preset, "experiment": experiment, "output_dir": str(outdir)}
    overrides.update(extra)
    return parse_config(None, overrides)


@pytest.fixture(scope="session")
def ci_theorem1(tmp_path_factory):
    cfg = _config("ci", "theorem1", tmp_path_factory.mktemp("ci_theorem1"))
    return harness.run_theorem1(cfg), cfg


@pytest.fixture(scope="session")
def desk_theorem1(tmp_path_factory):
    cfg = _config("desk", "theorem1", tmp_path_factory.mktemp("desk_theorem1"))
    return harness.run_theorem1(cfg), cfg


@pytest.fixture(scope="session")
def ci_bounds(tmp_path_factory):
    cfg = _config("ci", "verify-bounds", tmp_path_factory.mktemp("ci_bounds"))
    return harness.verify_all_bounds(cfg), cfg


@pytest.fixture(scope="session")
def zlatos_run(tmp_path_factory):
    cfg = _config("zlatos", "zlatos", tmp_path_factory.mktemp("zlatos"))
    return harness.run_zlatos(cfg), cfg


@pytest.fixture(scope="session")
def homogeneous_speed(tmp_path_factory):
    cfg = _config("homogeneous", "speed", tmp_path_factory.mktemp("speed"))
    return harness.run_speed(cfg), cfg
