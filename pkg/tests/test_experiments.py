import math

import pytest

from uavris import experiments as ex
from uavris.cli import main
from uavris.config import ExperimentConfig, load_config, parse_config
from uavris.errors import ConfigError, EmptyRegion
from uavris.stats import aggregate_moments

QUICK_VALIDATE = dict(validate_trials=20_000, validate_op_trials=20_000,
                      validate_area_geometries=5, validate_area_samples=100_000,
                      validate_path_positions=50, validate_trace_elements=20,
                      validate_trace_s=40.0, validate_trace_dt_s=0.002)


def test_empty_file_gives_defaults(tmp_path):
    path = tmp_path / "empty.cfg"
    path.write_text("")
    cfg = load_config(path)
    assert cfg == ExperimentConfig()
    assert (cfg.m, cfg.num_elements, cfg.xi_deg, cfg.bench1_combining) == (3.0, 800, 15.0,
                                                                          "coherent")


def test_db_keys_are_converted():
    cfg = parse_config("gamma_thr_db = 20\ngamma_t_db = 50  # transmit\n")
    assert cfg.gamma_thr == pytest.approx(100.0)
    assert cfg.gamma_t == pytest.approx(1e5)


def test_zero_theta_names_the_open_interval():
    with pytest.raises(ConfigError, match=r"theta_deg.*open interval \(0, 180\)"):
        parse_config("theta_deg = 0")


@pytest.mark.parametrize("text, pattern", [
    ("m = 3\nfoo = 1\n", r"line 2: unknown key 'foo'"),
    ("\n\nm 3\n", r"line 3: expected"),
    ("num_elements = 8.5", r"line 1: num_elements expects int"),
    ("m = 3\nm = 2", r"line 2: duplicate"),
    ("m = 0.2", r"m = 0.2: must be >= 0.5"),
    ("xi_deg = 30", r"xi_deg"),
    ("bench1_combining = magic", r"bench1_combining"),
])
def test_config_errors(text, pattern):
    with pytest.raises(ConfigError, match=pattern):
        parse_config(text)


def test_header_records_every_key():
    lines = ExperimentConfig().header_lines()
    assert "seed = 42" in lines and "gamma_thr_db = 20" in lines
    assert len(lines) == len(ExperimentConfig.__dataclass_fields__)


def test_r_grid_halving_keeps_rows():
    coarse = ex.r_grid(3.0, 100.0, 0.5)
    fine = ex.r_grid(3.0, 100.0, 0.25)
    assert coarse == fine[::2]
    assert fine[-1] == 100.0


def test_snr_rows_are_independent():
    cfg = ExperimentConfig(snr_r_max_m=10.0, snr_r_step_m=0.5)
    table = ex.sweep_snr(cfg)
    assert table.columns == ex.SNR_COLUMNS
    assert table.rows[5] == ex.snr_row(cfg, table.rows[5][0])
    fine = ex.sweep_snr(cfg.with_overrides(snr_r_step_m=0.25))
    assert fine.rows[::2] == table.rows


def test_snr_sweep_records_geometry_notes():
    cfg = ExperimentConfig(snr_r_min_m=0.05, snr_r_max_m=0.05)
    (row,) = ex.sweep_snr(cfg).rows
    assert row[4] == 0 and "no_illuminated_elements" in row[-1]


def test_csv_format():
    cfg = ExperimentConfig(op_r_min_m=15.0, op_r_max_m=16.0, op_r_step_m=0.5)
    text = ex.sweep_op(cfg).to_csv()
    lines = text.splitlines()
    assert lines[0] == "# command = sweep-op"
    header = next(line for line in lines if not line.startswith("#"))
    assert header == ",".join(ex.OP_COLUMNS)
    assert lines[-1].startswith("16,")
    assert ex.fmt(1 / 3) == "0.333333333" and ex.fmt(None) == "" and ex.fmt(math.nan) == ""


def test_op_grows_with_threshold():
    lo = ExperimentConfig(op_r_step_m=2.5)
    hi = lo.with_overrides(gamma_thr_db=23.0)
    for a, b in zip(ex.sweep_op(lo).rows, ex.sweep_op(hi).rows):
        for pa, pb in zip(a[1:], b[1:]):
            assert pa <= pb


@pytest.fixture(scope="module")
def boundary_3ms():
    cfg = ExperimentConfig(aod_rays=61, aod_rho_max_m=30.0)
    return cfg, ex.aod_boundary(cfg, 3e-3)


def test_boundary_vertices_hit_target(boundary_3ms):
    cfg, poly = boundary_3ms
    scanner = ex.BoundaryScanner(cfg.scenario(), 3e-3, math.pi / 2, 30.0, 0.25, 0.01)
    assert poly.segments
    for v in poly.vertices():
        assert abs(scanner.aod(v.rho, v.phi) - 3e-3) <= 0.01 * 3e-3
    assert poly.max_gap() <= cfg.aod_max_gap_m


def test_boundary_mirror_symmetry(boundary_3ms):
    _, poly = boundary_3ms
    verts = poly.vertices()
    for v in verts:
        twin = min(verts, key=lambda w: math.dist((w.x, w.y), (-v.x, v.y)))
        assert math.dist((twin.x, twin.y), (-v.x, v.y)) <= 0.01


def test_boundary_is_an_annulus(boundary_3ms):
    # too few elements close in, too much spillover far out
    _, poly = boundary_3ms
    assert {v.entering for v in poly.vertices()} == {True, False}


def test_empty_region_is_reported():
    cfg = ExperimentConfig(aod_rays=5, aod_rho_max_m=30.0)
    with pytest.raises(EmptyRegion):
        ex.aod_boundary(cfg, 1e-3)


def test_fewer_fades_shrink_region(boundary_3ms):
    cfg, poly3 = boundary_3ms
    poly1 = ex.aod_boundary(cfg, 3e-3, m=1.0)
    scn = cfg.scenario()
    for v in poly1.vertices():
        assert ex.in_region(scn, v.x, v.y, 3e-3, math.pi / 2, slack=0.05)


def test_cli_sweeps_are_byte_identical(tmp_path):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("snr_r_max_m = 8\nop_r_step_m = 2.5\n")
    for cmd in ("sweep-snr", "sweep-op"):
        a, b = tmp_path / f"{cmd}-a.csv", tmp_path / f"{cmd}-b.csv"
        assert main([cmd, "--config", str(cfg), "--out", str(a), "--seed", "7"]) == 0
        assert main([cmd, "--config", str(cfg), "--out", str(b), "--seed", "7"]) == 0
        assert a.read_bytes() == b.read_bytes()
        assert "# seed = 7" in a.read_text(encoding="utf-8")


def test_cli_boundary(tmp_path, capsys):
    cfg = tmp_path / "c.cfg"
    cfg.write_text("aod_rays = 9\naod_rho_max_m = 25\n")
    out = tmp_path / "b.csv"
    assert main(["aod-boundary", "--config", str(cfg), "--out", str(out),
                 "--target-ms", "3", "--theta-deg", "90"]) == 0
    text = out.read_text(encoding="utf-8")
    assert "# aod_target_ms = 3" in text and "segment,x_m,y_m" in text
    assert main(["aod-boundary", "--config", str(cfg), "--out", str(out)]) == 1
    assert "region = empty" in out.read_text(encoding="utf-8")
    assert "no scanned position" in capsys.readouterr().err


def test_cli_config_errors(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("theta_deg = 0\n")
    assert main(["sweep-op", "--config", str(cfg)]) == 2
    assert "open interval" in capsys.readouterr().err
    with pytest.raises(SystemExit):
        main(["sweep-op", "--seed", "-1"])


def test_validate_passes_and_is_deterministic():
    cfg = ExperimentConfig(**QUICK_VALIDATE)
    first = ex.validate(cfg)
    assert first.passed, first.render()
    assert first.render() == ex.validate(cfg).render()
    names = {r.name.split("[")[0] for r in first.rows}
    assert {"moments.mean", "moments.variance", "op", "area_overlap", "path_loss_forms",
            "trace.lcr", "trace.aod"} <= names


def test_validate_catches_a_tampered_variance():
    def tampered(count, nak):
        mean, var = aggregate_moments(count, nak)
        return mean, 1.25 * var

    report = ex.validate(ExperimentConfig(**QUICK_VALIDATE), moments=tampered)
    failed = {r.name for r in report.rows if not r.passed}
    assert any(name.startswith("moments.variance") for name in failed)
    assert not report.passed


def test_validate_cli_exit_status(tmp_path):
    cfg = tmp_path / "v.cfg"
    cfg.write_text("".join(f"{k} = {v}\n" for k, v in QUICK_VALIDATE.items()))
    out = tmp_path / "report.txt"
    assert main(["validate", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.read_text(encoding="utf-8").rstrip().endswith("overall: PASS")
