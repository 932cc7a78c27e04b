import json
import math
import struct
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from corridor_thz.analysis import analyze
from corridor_thz.dataio import (FORMAT_VERSION, MAGIC, FormatError, ScenarioError,
                                 load_gain_curve, load_scenario, parse_scenario, read_ctf,
                                 write_ctf, write_report)
from corridor_thz.scenario import CtfDataset, FrequencyGrid, Provenance, preset
from corridor_thz.synthesis import free_space, synthesize

SMALL = FrequencyGrid(250e9, 10e6, 5)


def _small(seed=0, dists=(1.0, 2.0, 3.5)):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((len(dists), 5)) + 1j * rng.standard_normal((len(dists), 5))
    return CtfDataset(SMALL, np.array(dists), v, Provenance.SIMULATED, {"scenario": "t", "seed": seed})


def test_binary_roundtrip_bit_identical(tmp_path):
    ds = _small()
    back = read_ctf(write_ctf(ds, tmp_path / "a.ctf"))
    assert back.values.tobytes() == ds.values.tobytes()
    assert back.grid == ds.grid and back.metadata == ds.metadata
    assert back.provenance is Provenance.SIMULATED
    assert (tmp_path / "a.ctf").read_bytes()[:4] == MAGIC


@settings(max_examples=25)
@given(st.integers(0, 2 ** 32 - 1))
def test_text_roundtrip(tmp_path_factory, seed):
    ds = _small(seed)
    p = tmp_path_factory.mktemp("t") / "a.csv"
    back = read_ctf(write_ctf(ds, p))
    np.testing.assert_allclose(back.values, ds.values, rtol=1e-12, atol=0)


def test_text_single_sign_flip(tmp_path):
    ds = _small()
    p = write_ctf(ds, tmp_path / "a.csv")
    lines = p.read_text().splitlines()
    body_start = next(i for i, l in enumerate(lines) if l.startswith("distance_m")) + 1
    row = lines[body_start + 7].split(",")
    row[2] = row[2][1:] if row[2].startswith("-") else "-" + row[2]
    lines[body_start + 7] = ",".join(row)
    p.write_text("\n".join(lines) + "\n")
    back = read_ctf(p)
    diff = back.values != ds.values
    assert diff.sum() == 1 and diff[1, 2]


def test_full_grid_io_speed(tmp_path, cetic_ctf):
    t0 = time.perf_counter()
    back = read_ctf(write_ctf(cetic_ctf, tmp_path / "cetic.ctf"))
    assert time.perf_counter() - t0 < 2.0
    assert back.values.shape == (45, 8001)


def _corrupt_binary(tmp_path, mutate):
    ds = _small()
    p = write_ctf(ds, tmp_path / "a.ctf")
    raw = p.read_bytes()
    (hlen,) = struct.unpack("<I", raw[4:8])
    header = json.loads(raw[8:8 + hlen])
    body = bytearray(raw[8 + hlen:])
    header, body = mutate(header, body)
    h = json.dumps(header).encode()
    p.write_bytes(MAGIC + struct.pack("<I", len(h)) + h + bytes(body))
    return p


def test_reject_newer_major(tmp_path):
    def newer(h, b):
        h["format_version"] = "2.0"
        return h, b
    with pytest.raises(FormatError, match="newer"):
        read_ctf(_corrupt_binary(tmp_path, newer))


def test_reject_dimension_mismatch(tmp_path):
    def extra(h, b):
        h["distances_m"].append(9.0)
        return h, b
    with pytest.raises(FormatError, match="expected"):
        read_ctf(_corrupt_binary(tmp_path, extra))


def test_reject_nonfinite(tmp_path):
    def nan(h, b):
        b[0:8] = struct.pack("<d", math.nan)
        return h, b
    with pytest.raises(FormatError, match="non-finite"):
        read_ctf(_corrupt_binary(tmp_path, nan))
    p = write_ctf(_small(), tmp_path / "b.csv")
    text = p.read_text().splitlines()
    text[-1] = ",".join(text[-1].split(",")[:2] + ["inf", "0"])
    p.write_text("\n".join(text) + "\n")
    with pytest.raises(FormatError, match="non-finite"):
        read_ctf(p)


def test_reject_malformed_header(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("# header: {not json\n")
    with pytest.raises(FormatError):
        read_ctf(p)
    p.write_text("distance_m,frequency_hz,real,imag\n1,2,3,4\n")
    with pytest.raises(FormatError):
        read_ctf(p)


def test_presets_load():
    cetic = load_scenario("cetic").scenario
    assert cetic.width == 1.80 and len(cetic.distances) == 45 and cetic.tx_height == 1.16
    citic = load_scenario("citic").scenario
    assert citic.width == 2.00 and len(citic.distances) == 27
    assert citic.distances[0] == 0.6 and citic.distances[-1] == pytest.approx(16.2)


GOOD = """\
name: lab
corridor:
  width_m: 2.2
  height_m: 2.8
  offset_w_m: 0.05
  antenna_height_m: 1.0
surfaces:
  walls: plasterboard
  floor: {name: tiles, rel_permittivity: 6.0}
antenna:
  gain_curve: [[250e9, 19.0], [330e9, 21.0]]
  hpbw_h_deg: 15
sweep:
  f_start_hz: 250e9
  f_step_hz: 50e6
  count: 1601
distances:
  start_m: 1.0
  step_m: 0.5
  count: 10
simulation:
  max_bounces: 4
  seed: 7
analysis:
  lee_m: 30
  window_form: literal-eq11
"""


def test_parse_good_scenario():
    sf = parse_scenario(GOOD)
    sc = sf.scenario
    assert sc.name == "lab" and sc.width == 2.2 and sc.max_bounces == 4
    assert sc.surfaces.floor.rel_permittivity == 6.0
    assert sc.surfaces.ceiling.name == "ceiling board"
    assert sc.antenna.boresight_curve == ((250e9, 19.0), (330e9, 21.0))
    assert sc.antenna.hpbw_h == pytest.approx(math.radians(15))
    assert sf.grid.count == 1601 and sf.seed == 7
    assert sc.distances == tuple(1.0 + 0.5 * i for i in range(10))
    assert sf.analysis.lee_m == 30 and sf.analysis.window_form == "literal-eq11"


@pytest.mark.parametrize("edit,where", [
    (("offset_w_m: 0.05", "offset_w_m: 1.1"), ":5: corridor.offset_w_m"),
    (("  hpbw_h_deg: 15", "  hpbw_h_deg: 15\n  colour: red"), ":13: antenna.colour"),
    (("  lee_m: 30", "  lee_m: 50"), "analysis"),
    (("count: 1601", "count: many"), ":16: sweep.count"),
    (("walls: plasterboard", "walls: marble"), ":8: surfaces.walls"),
    (("name: lab", "nmae: lab"), "nmae"),
])
def test_schema_errors_have_line_and_field(edit, where):
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(GOOD.replace(*edit), "lab.yaml")
    assert where in str(exc.value)


def test_gain_curve_file(tmp_path):
    (tmp_path / "gain.csv").write_text("frequency_hz,gain_db\n250e9,19.5\n330e9,20.5\n")
    text = GOOD.replace("  gain_curve: [[250e9, 19.0], [330e9, 21.0]]", "  gain_curve_file: gain.csv")
    (tmp_path / "s.yaml").write_text(text)
    sf = load_scenario(tmp_path / "s.yaml")
    assert sf.scenario.antenna.boresight_curve == ((250e9, 19.5), (330e9, 20.5))
    (tmp_path / "bad.csv").write_text("f,g\n1,2\nx,y\n")
    with pytest.raises(FormatError):
        load_gain_curve(tmp_path / "bad.csv")


def test_missing_file():
    with pytest.raises(ScenarioError):
        load_scenario("/nonexistent/scenario.yaml")


def test_report_files_and_determinism(tmp_path, citic_ctf):
    rep = analyze(citic_ctf, preset("citic").antenna)
    a = write_report(rep, tmp_path / "a", svg=True)
    b = write_report(analyze(citic_ctf, preset("citic").antenna), tmp_path / "b", svg=True)
    assert [p.name for p in a] == [p.name for p in b]
    for pa, pb in zip(a, b):
        assert pa.read_bytes() == pb.read_bytes()
    small = (tmp_path / "a" / "small_scale.csv").read_text().splitlines()
    assert small[0] == f"# format_version={FORMAT_VERSION}"
    assert len(small) == 2 + 27
    assert (tmp_path / "a" / "svg" / "k_factor.svg").read_text().startswith("<svg")


def test_los_report_exponent_column(tmp_path, citic_los_ctf):
    rep = analyze(citic_los_ctf, preset("citic").antenna)
    write_report(rep, tmp_path)
    rows = (tmp_path / "large_scale.csv").read_text().splitlines()[2:]
    assert rows and all(abs(float(r.split(",")[2]) + 2) < 0.005 for r in rows)


def test_report_rejects_unwritable(tmp_path, citic_ctf):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    rep = analyze(citic_ctf, preset("citic").antenna)
    with pytest.raises(OSError):
        write_report(rep, blocker / "sub")


def test_shipped_example_scenario():
    from pathlib import Path
    sf = load_scenario(Path(__file__).parent.parent / "configs" / "example_corridor.yaml")
    assert sf.scenario.name == "example" and len(sf.scenario.distances) == 40
    assert sf.scenario.noise_floor_db == -111.5 and sf.seed == 1


def test_explicit_distance_list():
    sf = parse_scenario("corridor: {width_m: 2, height_m: 2.6}\ndistances: {values_m: [1, 2.5, 4]}\n")
    assert sf.scenario.distances == (1.0, 2.5, 4.0)
    with pytest.raises(ScenarioError, match="distances"):
        parse_scenario("corridor: {width_m: 2, height_m: 2.6}\ndistances: {values_m: [2, 1]}\n")
    with pytest.raises(ScenarioError, match="values_m"):
        parse_scenario("corridor: {width_m: 2, height_m: 2.6}\ndistances: {values_m: [1, x]}\n")
