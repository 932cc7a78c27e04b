"""Scenario configs, CTF files (text and binary), report tables and plot grids.

Binary CTF layout (little endian)::

    b"HCTF" | uint32 header length | UTF-8 JSON header | complex128 body

The body is row-major (distance, frequency).  The text encoding is a CSV
with columns ``distance_m, frequency_hz, real, imag`` preceded by ``#``
comment lines, one of which carries the same JSON header.  Both carry a
``format_version``; readers refuse a newer major version.
"""

from __future__ import annotations

import csv
import io
import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .analysis import AnalysisConfig, ChannelReport
from .antenna import AntennaModel
from .materials import MATERIAL_PERMITTIVITY, Material, SurfaceAssignment
from .scenario import PRESETS, SOUNDER_GRID, CorridorScenario, CtfDataset, FrequencyGrid, Provenance

FORMAT_VERSION = "1.0"
MAGIC = b"HCTF"
_HEADER_PREFIX = "# header: "


class FormatError(ValueError):
    """Malformed or unsupported file."""


class ScenarioError(ValueError):
    """Scenario file failed validation; message carries file, line and field."""


def _check_version(version) -> None:
    try:
        major = int(str(version).split(".")[0])
    except ValueError:
        raise FormatError(f"bad format_version {version!r}") from None
    if major > int(FORMAT_VERSION.split(".")[0]):
        raise FormatError(f"format_version {version} is newer than supported {FORMAT_VERSION}")


# ---------------------------------------------------------------- CTF files

def _header(ctf: CtfDataset, encoding: str) -> dict:
    g = ctf.grid
    return {
        "format_version": FORMAT_VERSION,
        "encoding": encoding,
        "grid": {"f_start_hz": g.f_start, "f_step_hz": g.f_step, "count": g.count},
        "distances_m": [float(d) for d in ctf.distances],
        "provenance": ctf.provenance.value,
        "metadata": ctf.metadata,
        "units": {"distance": "m", "frequency": "Hz", "ctf": "linear complex S21"},
        "created_by": f"corridor_thz {__version__}",
    }


def _parse_header(header: dict):
    if not isinstance(header, dict):
        raise FormatError("header is not a JSON object")
    _check_version(header.get("format_version"))
    try:
        g = header["grid"]
        grid = FrequencyGrid(float(g["f_start_hz"]), float(g["f_step_hz"]), int(g["count"]))
        distances = np.asarray(header["distances_m"], dtype=float)
        provenance = Provenance(header.get("provenance", "measured"))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"malformed header: {exc}") from None
    return grid, distances, provenance, dict(header.get("metadata") or {})


def _validated(grid, distances, values, provenance, metadata) -> CtfDataset:
    if not np.all(np.isfinite(values)):
        raise FormatError("non-finite samples in CTF body")
    if not np.all(np.isfinite(distances)):
        raise FormatError("non-finite distances in header")
    try:
        return CtfDataset(grid, distances, values, provenance, metadata)
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def write_ctf(ctf: CtfDataset, path, encoding: str | None = None) -> Path:
    """Write ``ctf``; encoding defaults from the suffix (.csv/.txt -> text)."""
    path = Path(path)
    if encoding is None:
        encoding = "text" if path.suffix.lower() in (".csv", ".txt") else "binary"
    if encoding == "binary":
        header = json.dumps(_header(ctf, "binary"), sort_keys=True).encode()
        body = np.ascontiguousarray(ctf.values, dtype="<c16").tobytes()
        with open(path, "wb") as fh:
            fh.write(MAGIC)
            fh.write(struct.pack("<I", len(header)))
            fh.write(header)
            fh.write(body)
    elif encoding == "text":
        n_d, n_f = ctf.values.shape
        table = np.column_stack([
            np.repeat(ctf.distances, n_f),
            np.tile(ctf.grid.frequencies, n_d),
            ctf.values.real.ravel(),
            ctf.values.imag.ravel(),
        ])
        with open(path, "w", newline="") as fh:
            fh.write("# corridor_thz CTF text file\n")
            fh.write(_HEADER_PREFIX + json.dumps(_header(ctf, "text"), sort_keys=True) + "\n")
            fh.write("distance_m,frequency_hz,real,imag\n")
            np.savetxt(fh, table, fmt="%.17g", delimiter=",")
    else:
        raise ValueError(f"unknown encoding {encoding!r}")
    return path


def read_ctf(path) -> CtfDataset:
    path = Path(path)
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == MAGIC:
        return _read_binary(path)
    return _read_text(path)


def _read_binary(path: Path) -> CtfDataset:
    raw = path.read_bytes()
    if len(raw) < 8:
        raise FormatError("truncated binary CTF file")
    (hlen,) = struct.unpack("<I", raw[4:8])
    try:
        header = json.loads(raw[8:8 + hlen].decode())
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"malformed header: {exc}") from None
    grid, distances, provenance, meta = _parse_header(header)
    body = raw[8 + hlen:]
    expected = distances.size * grid.count * 16
    if len(body) != expected:
        raise FormatError(f"body has {len(body)} bytes, expected {expected} "
                          f"({distances.size} x {grid.count} complex128)")
    values = np.frombuffer(body, dtype="<c16").reshape(distances.size, grid.count).astype(complex)
    return _validated(grid, distances, values, provenance, meta)


def _read_text(path: Path) -> CtfDataset:
    header = None
    with open(path) as fh:
        for line in fh:
            if line.startswith(_HEADER_PREFIX):
                try:
                    header = json.loads(line[len(_HEADER_PREFIX):])
                except json.JSONDecodeError as exc:
                    raise FormatError(f"malformed header: {exc}") from None
            if not line.startswith("#"):
                break
    if header is None:
        raise FormatError(f"{path}: no CTF header found")
    grid, distances, provenance, meta = _parse_header(header)
    try:
        table = _load_table(path)
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    n = distances.size * grid.count
    if table.shape != (n, 4):
        raise FormatError(f"body has {table.shape[0]} rows, expected {n} "
                          f"({distances.size} x {grid.count})")
    if not np.all(np.isfinite(table)):
        raise FormatError("non-finite samples in CTF body")
    d_col = table[:, 0].reshape(distances.size, grid.count)
    f_col = table[:, 1].reshape(distances.size, grid.count)
    if not np.allclose(d_col, distances[:, None], rtol=1e-12, atol=0):
        raise FormatError("distance column does not match header")
    if not np.allclose(f_col, grid.frequencies[None, :], rtol=1e-12, atol=0):
        raise FormatError("frequency column does not match header grid")
    values = (table[:, 2] + 1j * table[:, 3]).reshape(distances.size, grid.count)
    return _validated(grid, distances, values, provenance, meta)


def _load_table(path: Path) -> np.ndarray:
    with open(path) as fh:
        lines = (l for l in fh if not l.startswith("#"))
        first = next(lines, None)
        if first is None or not first.startswith("distance_m"):
            raise ValueError("missing column header 'distance_m,frequency_hz,real,imag'")
        return np.loadtxt(lines, delimiter=",", ndmin=2)


# ---------------------------------------------------------------- gain curves

def load_gain_curve(path) -> tuple[tuple[float, float], ...]:
    """Two-column CSV ``frequency_hz, gain_db`` (optional header row)."""
    points = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].lstrip().startswith("#"):
                continue
            try:
                f, g = float(row[0]), float(row[1])
            except (ValueError, IndexError):
                if lineno == 1:
                    continue    # header
                raise FormatError(f"{path}:{lineno}: expected 'frequency_hz,gain_db'") from None
            if not (math.isfinite(f) and math.isfinite(g)):
                raise FormatError(f"{path}:{lineno}: non-finite value")
            points.append((f, g))
    if not points:
        raise FormatError(f"{path}: no gain points")
    return tuple(sorted(points))


# ---------------------------------------------------------------- scenarios

@dataclass(frozen=True)
class ScenarioFile:
    scenario: CorridorScenario
    grid: FrequencyGrid
    analysis: AnalysisConfig
    seed: int = 0


_SCHEMA = {
    "format_version": None,
    "name": None,
    "corridor": {"width_m", "height_m", "offset_w_m", "antenna_height_m"},
    "surfaces": {"walls", "floor", "ceiling"},
    "antenna": {"gain_db", "gain_curve", "gain_curve_file", "hpbw_h_deg", "hpbw_e_deg",
                "sidelobe_h_db", "sidelobe_e_db", "hpbw_curve_deg"},
    "sweep": {"f_start_hz", "f_step_hz", "count"},
    "distances": {"start_m", "step_m", "count", "values_m"},
    "simulation": {"max_bounces", "noise_floor_db", "seed"},
    "analysis": {"lee_m", "pdp_threshold_db", "fcf_threshold", "window_form", "edge", "fit_mode"},
}
_REQUIRED = ("corridor",)


def _key_lines(text: str) -> dict:
    """Map key paths to 1-based line numbers."""
    lines = {}

    def walk(node, prefix):
        if isinstance(node, yaml.MappingNode):
            for k, v in node.value:
                path = prefix + (str(k.value),)
                lines[path] = k.start_mark.line + 1
                walk(v, path)

    try:
        walk(yaml.compose(text), ())
    except yaml.YAMLError:
        pass
    return lines


class _Reader:
    def __init__(self, source: str, lines: dict):
        self.source, self.lines = source, lines

    def fail(self, path: tuple, msg: str):
        line = None
        for i in range(len(path), 0, -1):
            line = self.lines.get(tuple(path[:i]))
            if line:
                break
        where = f"{self.source}:{line}" if line else self.source
        raise ScenarioError(f"{where}: {'.'.join(path) or '<root>'}: {msg}")

    def block(self, data: dict, name: str) -> dict:
        value = data.get(name, {})
        if value is None:
            value = {}
        if not isinstance(value, dict):
            self.fail((name,), "expected a mapping")
        unknown = set(value) - _SCHEMA[name]
        if unknown:
            self.fail((name, sorted(unknown)[0]), f"unknown key (allowed: {sorted(_SCHEMA[name])})")
        return value

    def number(self, block: dict, path: tuple, default=None, *, integer=False, optional=False):
        value = block.get(path[-1], default)
        if value is None:
            if optional:
                return None
            self.fail(path, "required value missing")
        try:
            out = float(value) if not integer else int(value)
            if integer and float(value) != out:
                raise ValueError
        except (TypeError, ValueError):
            self.fail(path, f"expected {'an integer' if integer else 'a number'}, got {value!r}")
        if not math.isfinite(out):
            self.fail(path, "value must be finite")
        return out


def _material(reader: _Reader, spec, path) -> Material:
    if isinstance(spec, str):
        if spec not in MATERIAL_PERMITTIVITY:
            reader.fail(path, f"unknown material {spec!r} (known: {sorted(MATERIAL_PERMITTIVITY)})")
        return Material(spec, MATERIAL_PERMITTIVITY[spec])
    if isinstance(spec, dict):
        extra = set(spec) - {"name", "rel_permittivity"}
        if extra:
            reader.fail(path + (sorted(extra)[0],), "unknown key")
        er = reader.number(spec, path + ("rel_permittivity",))
        try:
            return Material(str(spec.get("name", path[-1])), er)
        except ValueError as exc:
            reader.fail(path, str(exc))
    reader.fail(path, "expected a material name or {name, rel_permittivity}")


def _curve(reader, values, path, scale=1.0):
    if not isinstance(values, list) or not values:
        reader.fail(path, "expected a list of [frequency_hz, value] pairs")
    pts = []
    for i, p in enumerate(values):
        if not (isinstance(p, list) and len(p) == 2):
            reader.fail(path, f"entry {i} is not a [frequency_hz, value] pair")
        pts.append((reader.number({"f": p[0]}, path + ("f",)), reader.number({"v": p[1]}, path + ("v",)) * scale))
    return tuple(sorted(pts))


def parse_scenario(text: str, source: str = "<string>", base_dir: Path | None = None) -> ScenarioFile:
    lines = _key_lines(text)
    reader = _Reader(source, lines)
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ScenarioError(f"{source}: YAML syntax error: {exc}") from None
    if not isinstance(data, dict):
        reader.fail((), "top level must be a mapping")
    unknown = set(data) - set(_SCHEMA)
    if unknown:
        reader.fail((sorted(unknown)[0],), f"unknown top-level key (allowed: {sorted(_SCHEMA)})")
    if "format_version" in data:
        try:
            _check_version(data["format_version"])
        except FormatError as exc:
            reader.fail(("format_version",), str(exc))
    for key in _REQUIRED:
        if key not in data:
            reader.fail((key,), "required block missing")

    cor = reader.block(data, "corridor")
    width = reader.number(cor, ("corridor", "width_m"))
    height = reader.number(cor, ("corridor", "height_m"))
    dw = reader.number(cor, ("corridor", "offset_w_m"), 0.0)
    ht = reader.number(cor, ("corridor", "antenna_height_m"), height / 2)
    if not (width > 0 and height > 0):
        reader.fail(("corridor",), "width_m and height_m must be positive")
    if not abs(dw) < width / 2:
        reader.fail(("corridor", "offset_w_m"), f"|offset| must be below width/2 = {width / 2}")
    if not 0 < ht < height:
        reader.fail(("corridor", "antenna_height_m"), f"must lie strictly between floor and ceiling (0, {height})")

    sur = reader.block(data, "surfaces")
    surfaces = SurfaceAssignment(
        _material(reader, sur.get("walls", "plasterboard"), ("surfaces", "walls")),
        _material(reader, sur.get("floor", "concrete"), ("surfaces", "floor")),
        _material(reader, sur.get("ceiling", "ceiling board"), ("surfaces", "ceiling")),
    )

    ant = reader.block(data, "antenna")
    sources = [k for k in ("gain_db", "gain_curve", "gain_curve_file") if k in ant]
    if len(sources) > 1:
        reader.fail(("antenna", sources[1]), "give only one of gain_db, gain_curve, gain_curve_file")
    if "gain_curve" in ant:
        curve = _curve(reader, ant["gain_curve"], ("antenna", "gain_curve"))
    elif "gain_curve_file" in ant:
        p = Path(str(ant["gain_curve_file"]))
        if not p.is_absolute() and base_dir is not None:
            p = base_dir / p
        try:
            curve = load_gain_curve(p)
        except (OSError, FormatError) as exc:
            reader.fail(("antenna", "gain_curve_file"), str(exc))
    else:
        curve = ((290e9, reader.number(ant, ("antenna", "gain_db"), 20.0)),)
    hpbw_curve = None
    if "hpbw_curve_deg" in ant:
        hpbw_curve = _curve(reader, ant["hpbw_curve_deg"], ("antenna", "hpbw_curve_deg"), math.pi / 180)
    try:
        antenna = AntennaModel(
            boresight_curve=curve,
            hpbw_h=math.radians(reader.number(ant, ("antenna", "hpbw_h_deg"), 16.5)),
            hpbw_e=math.radians(reader.number(ant, ("antenna", "hpbw_e_deg"), 16.5)),
            sidelobe_floor_h=reader.number(ant, ("antenna", "sidelobe_h_db"), 11.5),
            sidelobe_floor_e=reader.number(ant, ("antenna", "sidelobe_e_db"), 32.5),
            hpbw_curve=hpbw_curve,
        )
    except ScenarioError:
        raise
    except ValueError as exc:
        reader.fail(("antenna",), str(exc))

    sw = reader.block(data, "sweep")
    try:
        grid = FrequencyGrid(
            reader.number(sw, ("sweep", "f_start_hz"), SOUNDER_GRID.f_start),
            reader.number(sw, ("sweep", "f_step_hz"), SOUNDER_GRID.f_step),
            reader.number(sw, ("sweep", "count"), SOUNDER_GRID.count, integer=True),
        )
    except ScenarioError:
        raise
    except ValueError as exc:
        reader.fail(("sweep",), str(exc))
    if not antenna.covers(grid.frequencies[[0, -1]]):
        reader.fail(("antenna",), "gain curve does not cover the sweep")

    dist = reader.block(data, "distances")
    if "values_m" in dist:
        if set(dist) != {"values_m"}:
            reader.fail(("distances",), "values_m cannot be combined with start_m/step_m/count")
        vals = dist["values_m"]
        if not isinstance(vals, list) or not vals:
            reader.fail(("distances", "values_m"), "expected a non-empty list")
        distances = tuple(reader.number({"values_m": v}, ("distances", "values_m")) for v in vals)
    elif dist:
        start = reader.number(dist, ("distances", "start_m"))
        step = reader.number(dist, ("distances", "step_m"))
        count = reader.number(dist, ("distances", "count"), integer=True)
        if count < 1:
            reader.fail(("distances", "count"), "must be >= 1")
        distances = tuple(round(start + step * i, 10) for i in range(count))
    else:
        reader.fail(("distances",), "required block missing")

    sim = reader.block(data, "simulation")
    nb = reader.number(sim, ("simulation", "max_bounces"), 6, integer=True)
    noise = reader.number(sim, ("simulation", "noise_floor_db"), None, optional=True)
    seed = reader.number(sim, ("simulation", "seed"), 0, integer=True)

    try:
        scenario = CorridorScenario(
            name=str(data.get("name", Path(source).stem)), width=width, height=height,
            tx_offset_w=dw, tx_height=ht, distances=distances, surfaces=surfaces,
            antenna=antenna, max_bounces=nb, noise_floor_db=noise)
    except ValueError as exc:
        reader.fail(("distances",) if "distance" in str(exc) else ("simulation",), str(exc))

    an = reader.block(data, "analysis")
    kwargs = {}
    if "lee_m" in an:
        kwargs["lee_m"] = reader.number(an, ("analysis", "lee_m"), integer=True)
    if "pdp_threshold_db" in an:
        kwargs["pdp_threshold_db"] = reader.number(an, ("analysis", "pdp_threshold_db"), optional=True)
    if "fcf_threshold" in an:
        kwargs["fcf_threshold"] = reader.number(an, ("analysis", "fcf_threshold"))
    for key in ("window_form", "edge", "fit_mode"):
        if key in an:
            kwargs[key] = str(an[key])
    try:
        analysis = AnalysisConfig(**kwargs)
    except ValueError as exc:
        reader.fail(("analysis",), str(exc))
    return ScenarioFile(scenario, grid, analysis, seed)


def load_scenario(source) -> ScenarioFile:
    """Named preset (``citic``, ``cetic``) or a YAML scenario file."""
    if isinstance(source, str) and source.lower() in PRESETS:
        return ScenarioFile(PRESETS[source.lower()], SOUNDER_GRID, AnalysisConfig())
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioError(f"{path}: cannot read scenario: {exc}") from None
    return parse_scenario(text, str(path), path.parent)


# ---------------------------------------------------------------- reports

def _fmt(x: float, digits: int) -> str:
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.{digits}f}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    buf = io.StringIO()
    buf.write(f"# format_version={FORMAT_VERSION}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    path.write_text(buf.getvalue())


def write_report(report: ChannelReport, out_dir, svg: bool = False) -> list[Path]:
    """Write the large- and small-scale tables plus plot-data grids.

    Output is a pure function of ``report``: no timestamps, fixed column
    order and number formatting.
    """
    if not report.small_scale and not report.fits:
        raise ValueError("empty report")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create report directory {out}: {exc}") from None
    written = []

    path = out / "large_scale.csv"
    _write_csv(path, ["fit", "frequency_ghz", "n", "A_db", "sigma_db"],
               [[key, _fmt(r.frequency / 1e9, 3), _fmt(r.exponent, 4), _fmt(r.intercept, 3),
                 _fmt(r.sigma, 3)]
                for key, recs in report.fits.items() for r in recs])
    written.append(path)

    path = out / "small_scale.csv"
    _write_csv(path, ["corridor", "distance_m", "k_factor_db", "delay_spread_ns",
                      "coherence_bw_mhz", "mean_delay_ns", "window_L", "flags"],
               [[r.corridor, _fmt(r.d, 2), _fmt(r.k_factor, 3), _fmt(r.delay_spread * 1e9, 5),
                 _fmt(r.coherence_bw / 1e6, 2), _fmt(r.mean_delay * 1e9, 5), r.window_L,
                 "; ".join(r.flags)]
                for r in report.small_scale])
    written.append(path)

    path = out / "fit_vs_frequency.csv"
    _write_csv(path, ["fit", "frequency_hz", "n", "A_db", "sigma_db"],
               [[key, _fmt(f, 0), _fmt(n, 5), _fmt(a, 4), _fmt(s, 4)]
                for key, sw in report.sweeps.items()
                for f, n, a, s in zip(sw.frequencies, sw.exponent, sw.intercept, sw.sigma)])
    written.append(path)

    for label, grid in report.pdp_grids.items():
        path = out / f"pdp_{label}.csv"
        db = np.maximum(grid.power_db, -300.0)
        buf = io.StringIO()
        buf.write(f"# format_version={FORMAT_VERSION}\n")
        buf.write("# rows: Tx-Rx distance [m]; columns: delay distance [m]; values: PDP [dB]\n")
        buf.write("distance_m," + ",".join(f"{x:.5f}" for x in grid.delay_distances) + "\n")
        for d, row in zip(grid.distances, db):
            buf.write(f"{d:.2f}," + ",".join(f"{v:.2f}" for v in row) + "\n")
        path.write_text(buf.getvalue())
        written.append(path)

    if report.failures:
        path = out / "failures.txt"
        path.write_text("\n".join(report.failures) + "\n")
        written.append(path)

    if svg:
        from .plots import render_report
        written.extend(render_report(report, out / "svg"))
    return written
