import csv
import io
import math

import numpy as np
import pytest
from click.testing import CliRunner
from scipy.integrate import quad

import artifact.harness_cli as harness
from artifact.errors import PositivityError, ValidationError
from artifact.euler_model import GasConstants
from artifact.fv_core import Mesh1D, Mesh2D, SchemeConfig
from artifact.harness_cli import (PROBLEMS, SOD, ConfigError, build_case,
                                  cell_average, efficiency_compare, field_rows, l1_error, main,
                                  observed_orders, parse_config, run_case, run_convergence,
                                  run_problem, serialize_config)
from oracles import bisection_star_pressure

QUADRANT_CFG = """
[scheme]
cfl = 0.45
reconstruction = minmod
solver = nonlinear
stepping = two_stage_4
transversal = true
basis = primitive
alpha = 1.5

[problem]
name = quadrant
n = 200
final_time = 0.3
"""


# --------------------------------------------------------------- config

def test_minimal_config_defaults():
    cfg = parse_config("[problem]\nname = advection\n")
    assert (cfg.scheme.cfl, cfg.scheme.reconstruction, cfg.scheme.stepping) == \
        (0.5, "hweno5", "two_stage_4")


def test_config_rejects_bad_cfl():
    with pytest.raises(ConfigError, match="cfl"):
        parse_config("[scheme]\ncfl = 1.5\n[problem]\nname = advection\n")


@pytest.mark.parametrize("text, where", [
    ("[scheme]\nspeed = 2\n[problem]\nname = sod\n", "scheme.speed"),
    ("[physics]\ng = 1\n[problem]\nname = sod\n", "physics"),
    ("[problem]\nname = nowhere\n", "problem.name"),
    ("[problem]\nn = 40\n", "problem.name"),
    ("name = sod\n", "line 1"),
    ("[problem]\nname = sod\nn = forty\n", "problem.n"),
    ("[problem]\nname = quadrant\n[scheme]\nreconstruction = hweno5\n", "reconstruction"),
])
def test_config_errors_name_the_field(text, where):
    with pytest.raises(ConfigError, match=where.replace(".", r"\.")):
        parse_config(text)


def test_quadrant_config_round_trip():
    cfg = parse_config(QUADRANT_CFG)
    again = parse_config(serialize_config(cfg))
    assert again.scheme == cfg.scheme
    assert again.problem == cfg.problem
    assert serialize_config(again) == serialize_config(cfg)


def test_problem_scheme_defaults():
    cfg = parse_config("[problem]\nname = density_ratio\n")
    assert (cfg.scheme.cfl, cfg.scheme.reconstruction) == (0.4, "minmod")
    cfg = parse_config("[problem]\nname = density_ratio\n[scheme]\nreconstruction = hweno5\n")
    assert cfg.scheme.reconstruction == "hweno5"


# ---------------------------------------------------------------- norms

def test_l1_error_examples():
    mesh = Mesh1D(0.0, 1.0, 32)
    f = lambda x: np.exp(np.sin(3 * x))
    avg = cell_average(f, mesh)
    assert l1_error(avg, f, mesh) == 0.0
    assert l1_error(avg + 0.01, f, mesh) == pytest.approx(0.01, abs=1e-15)


def test_l1_error_fine_quadrature():
    mesh = Mesh1D(0.0, 1.0, 16)
    f = lambda x: np.exp(np.sin(3 * x))
    num = np.cos(mesh.centers)
    ref = sum(abs(num[j] - quad(f, a, b, epsabs=1e-14, epsrel=1e-13)[0] / mesh.h)
              for j, (a, b) in enumerate(zip(mesh.edges[:-1], mesh.edges[1:]))) * mesh.h
    assert l1_error(num, f, mesh) == pytest.approx(ref, abs=1e-12)


def test_l1_error_2d():
    mesh = Mesh2D((0.0, 2.0, 0.0, 1.0), 8, 4)
    f = lambda x, y: x * y * y
    avg = cell_average(f, mesh)
    assert l1_error(avg + 0.5, f, mesh) == pytest.approx(0.5 * 2.0, abs=1e-14)


def test_observed_orders():
    assert observed_orders([10, 20, 40], [1.0, 0.25, 0.0625]) == [None, 2.0, 2.0]


# ----------------------------------------------------------------- runs

def test_unknown_problem():
    with pytest.raises(ValidationError):
        build_case("vortex", 10)


def test_sod_shock_position():
    res = run_problem(parse_config("[problem]\nname = sod\nn = 400\n"))
    s = res.summary
    assert s["min_density"] > 0 and s["min_pressure"] > 0
    assert s["conservation_drift"] < 1e-12
    g = GasConstants(1.4)
    p0, u0 = bisection_star_pressure(*SOD, 1.4)
    rho_r, p_r = SOD[1].rho, SOD[1].p
    rho0r = rho_r * (p0 / p_r + g.mu2) / (g.mu2 * p0 / p_r + 1)
    sigma = u0 * rho0r / (rho0r - rho_r)
    xs = 0.5 + sigma * 0.2
    rho = res.field.ubar[0]
    x = res.case.mesh.centers
    mid = 0.5 * (rho0r + rho_r)
    j = np.flatnonzero((rho[:-1] > mid) & (rho[1:] <= mid))[-1]
    xnum = x[j] + (rho[j] - mid) / (rho[j] - rho[j + 1]) * (x[j + 1] - x[j])
    assert abs(xnum - xs) < 2 * res.case.mesh.h


def test_steady_nozzle_residual():
    res = run_problem(parse_config("[problem]\nname = nozzle_supersonic\nn = 50\n"
                                   "tolerance = 1e-9\nmax_steps = 20000\n"))
    assert res.summary["residual"] < 1e-8
    mesh = res.case.mesh
    assert l1_error(res.field.ubar[0], res.case.exact, mesh) < 1e-4


def test_field_csv_and_determinism(tmp_path):
    text = "[problem]\nname = density_wave\nn = 16\nfinal_time = 0.05\n"
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    for p in (p1, p2):
        cfg = parse_config(text + f"[output]\nfield = {p}\n")
        run_problem(cfg)
    a = p1.read_text()
    assert a == p2.read_text()
    rows = list(csv.reader(io.StringIO(a)))
    assert rows[0] == ["x", "rho", "u", "p", "S"]
    assert len(rows) == 17
    assert all(len(r) == 5 for r in rows)


def test_field_rows_2d():
    case = build_case("quadrant", 8, 0.01)
    res = run_case(case, SchemeConfig(reconstruction="minmod"))
    header, rows = field_rows(res)
    assert header == ["x", "y", "rho", "u", "v", "p", "S"]
    assert len(list(rows)) == 64
    assert res.summary["conservation_drift"] < 1e-13


def test_convergence_report_integrity(tmp_path):
    out = tmp_path / "conv.csv"
    cfg = parse_config(f"[problem]\nname = advection\nfinal_time = 0.25\n"
                       f"[output]\nconvergence = {out}\n")
    rep = run_convergence(cfg, [10, 20, 40])
    lines = out.read_text().splitlines()
    assert lines[0] == "N,L1_error,order"
    assert lines[1].endswith(",")
    errs = [float(l.split(",")[1]) for l in lines[1:]]
    for (n0, e0), (n1, e1), line in zip(zip(rep.meshes, errs), zip(rep.meshes[1:], errs[1:]),
                                        lines[2:]):
        assert float(line.split(",")[2]) == pytest.approx(
            math.log(e0 / e1) / math.log(n1 / n0), abs=1e-12)
    assert rep.orders[-1] > 4.0
    assert rep.reconstructions[1] == 2 * rep.reconstructions[0]


def test_convergence_rejects_steady_and_no_reference():
    with pytest.raises(ValidationError):
        run_convergence(parse_config("[problem]\nname = nozzle_supersonic\n"), [10])
    with pytest.raises(ValidationError):
        run_convergence(parse_config("[problem]\nname = quadrant\n"), [10])


def test_efficiency_counts():
    cfg = parse_config("[problem]\nname = sod\n")
    small = efficiency_compare(cfg, 40)
    assert small.per_step == (2.0, 4.0)
    assert small.reconstructions_rk4 == 2 * small.reconstructions_two_stage
    big = efficiency_compare(cfg, 80)
    # calls scale with the step count
    assert big.steps > small.steps
    assert small.reconstructions_two_stage == 2 * small.steps
    assert big.reconstructions_two_stage == 2 * big.steps


# ------------------------------------------------------------------ CLI

def test_cli_list_problems():
    r = CliRunner().invoke(main, ["list-problems"])
    assert r.exit_code == 0
    for pid in PROBLEMS:
        assert pid in r.output


def test_cli_run_and_exit_codes(tmp_path, monkeypatch):
    good = tmp_path / "good.ini"
    good.write_text("[problem]\nname = advection\nn = 10\nfinal_time = 0.1\n")
    r = CliRunner().invoke(main, ["run", str(good)])
    assert r.exit_code == 0 and "l1_error" in r.output
    bad = tmp_path / "bad.ini"
    bad.write_text("[scheme]\ncfl = 1.5\n[problem]\nname = advection\n")
    r = CliRunner().invoke(main, ["run", str(bad)])
    assert r.exit_code == 1 and "cfl" in r.output
    r = CliRunner().invoke(main, ["run", str(tmp_path / "missing.ini")])
    assert r.exit_code == 1

    def fail(cfg):
        raise PositivityError("step 3 (t = 0.01): non-positive pressure at index (7,)")
    monkeypatch.setattr(harness, "run_problem", fail)
    r = CliRunner().invoke(main, ["run", str(good)])
    assert r.exit_code == 2 and "index (7,)" in r.output


def test_cli_convergence(tmp_path):
    cfgf = tmp_path / "c.ini"
    cfgf.write_text("[problem]\nname = advection\nfinal_time = 0.1\n")
    r = CliRunner().invoke(main, ["convergence", str(cfgf), "--meshes", "10,20"])
    assert r.exit_code == 0
    assert r.output.splitlines()[0] == "N,L1_error,order"
    r = CliRunner().invoke(main, ["convergence", str(cfgf), "--meshes", "ten"])
    assert r.exit_code == 1


def test_cli_compare_efficiency(tmp_path):
    cfgf = tmp_path / "e.ini"
    cfgf.write_text("[problem]\nname = sod\n")
    r = CliRunner().invoke(main, ["compare-efficiency", str(cfgf), "--n", "30"])
    assert r.exit_code == 0
    assert "two_stage_4 = 2  rk4 = 4" in r.output
