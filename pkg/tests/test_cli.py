import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from commuting_rmt import io, verify
from commuting_rmt.cli import main

finite = st.floats(allow_nan=False, allow_infinity=False, width=64)
cells = st.one_of(finite, st.integers(-(2**62), 2**62), st.sampled_from([math.inf, -math.inf]))


@st.composite
def documents(draw):
    names = draw(st.lists(st.from_regex(r"[a-z][a-z_]{0,8}", fullmatch=True), min_size=1, max_size=3, unique=True))
    data = {}
    for name in names:
        width = draw(st.integers(1, 4))
        rows = draw(st.lists(st.lists(cells, min_size=width, max_size=width), max_size=6))
        data[name] = {"columns": [f"c{k}" for k in range(width)], "rows": rows}
    return {"config": {"seed": draw(st.integers(0, 2**63)), "d": 2}, "data": data, "checks": {"ks": draw(finite)}}


@settings(max_examples=100, deadline=None)
@given(doc=documents(), fmt=st.sampled_from(["csv", "json"]))
def test_emit_parse_round_trip(doc, fmt):
    text = io.emit(doc, fmt)
    back = io.parse(text, fmt)
    assert io.emit(back, fmt) == text
    assert back["data"] == doc["data"]


def test_atomic_write_leaves_no_partial(tmp_path):
    path = tmp_path / "out.csv"
    io.write_output(path, {"config": {}, "data": {"t": io.table(["a"], [[1.5]])}, "checks": {}})
    assert path.exists()
    assert not list(tmp_path.glob("*.partial"))


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_sample_shape_contract(tmp_path, capsys):
    out = tmp_path / "s.csv"
    code, _ = run(capsys, "sample-hermitian", "--n", 2, "--d", 1, "--length", 10, "--seed", 7, "--out", out)
    assert code == 0
    table = io.read_output(out)["data"]["eigenvalues"]
    assert len(table["rows"]) == 10
    assert all(len(r) == 2 for r in table["rows"])
    assert io.read_output(out)["config"]["seed"] == 7


def test_sample_determinism(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(capsys, "sample-hermitian", "--n", 3, "--d", 2, "--length", 20, "--seed", 11, "--out", path)
    assert a.read_bytes() == b.read_bytes()


def test_sample_reconstruct_emits_matrices(tmp_path, capsys):
    out = tmp_path / "s.json"
    code, _ = run(capsys, "sample-hermitian", "--n", 3, "--d", 2, "--length", 4, "--reconstruct", "--out", out)
    assert code == 0
    mats = io.read_output(out)["data"]["matrices"]
    assert mats["columns"] == ["sample", "component", "row", "col", "re", "im"]
    assert len(mats["rows"]) == 4 * 2 * 3 * 3


def test_sample_projected_ks_printed(tmp_path, capsys):
    out = tmp_path / "h.csv"
    args = ["--n", 64, "--d", 2, "--chains", 50, "--length", 50, "--thin", 1, "--burn-in", 300, "--out", out]
    code, captured = run(capsys, "sample-hermitian", *args)
    assert code == 0
    assert "KS(sqrt(n)-scaled first coordinate vs f_2)" in captured.out
    assert io.read_output(out)["checks"]["projected_ks"] < 0.05


@pytest.mark.parametrize("argv", [["--n", 0], ["--gamma", -1], ["--length", 0], ["--burn-in", -5]])
def test_config_errors_exit_2(argv, capsys):
    code, captured = run(capsys, "sample-hermitian", *argv)
    assert code == 2
    assert "configuration error" in captured.err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sample-hermitian", "--d", "x"])
    assert exc.value.code == 2


def test_bad_thread_cap_exits_2(monkeypatch, capsys):
    monkeypatch.setenv("RMT_THREADS", "many")
    code, _ = run(capsys, "verify", "--only", "combinatorics")
    assert code == 2


def test_equilibrium_d1_support(tmp_path, capsys):
    out = tmp_path / "e.csv"
    code, _ = run(capsys, "equilibrium", "--d", 1, "--gamma", 0.5, "--n", 100, "--out", out)
    assert code == 0
    lo, hi = io.read_output(out)["checks"]["support"]
    eps = 0.05 * 2
    assert -2 - eps <= lo and hi <= 2 + eps


def test_equilibrium_d5_sphere(tmp_path, capsys):
    out = tmp_path / "e.json"
    code, _ = run(capsys, "equilibrium", "--d", 5, "--gamma", 0.5, "--n", 200, "--tol", 1e-6, "--out", out)
    assert code == 0
    checks = io.read_output(out)["checks"]
    assert checks["radius"] == pytest.approx(1.0)
    assert checks["sphere_spread"] <= 0.02 and checks["sphere_ok"]


def test_equilibrium_csv_json_identical(tmp_path, capsys):
    for ext in ("csv", "json"):
        run(capsys, "equilibrium", "--d", 2, "--n", 30, "--gamma", 1.0, "--out", tmp_path / f"e.{ext}")
    a, b = io.read_output(tmp_path / "e.csv"), io.read_output(tmp_path / "e.json")
    assert a == b
    assert "radial" in a["data"]


def test_equilibrium_nonconvergence_exit_3_still_writes(tmp_path, capsys):
    out = tmp_path / "e.csv"
    code, _ = run(capsys, "equilibrium", "--d", 2, "--n", 40, "--max-iter", 2, "--out", out)
    assert code == 3
    doc = io.read_output(out)
    assert doc["checks"]["converged"] is False
    assert len(doc["data"]["points"]["rows"]) == 40


def test_output_files_round_trip(tmp_path, capsys):
    run(capsys, "sample-hermitian", "--n", 2, "--d", 2, "--length", 5, "--reconstruct", "--out", tmp_path / "s.csv")
    run(capsys, "density-2x2", "--d", 3, "--grid-points", 9, "--out", tmp_path / "g.json")
    for path in tmp_path.iterdir():
        assert io.emit(io.read_output(path), io.format_for(path)) == path.read_text()


def _grid(tmp_path, capsys, d, *extra):
    out = tmp_path / f"g{d}.csv"
    code, captured = run(capsys, "density-2x2", "--d", d, "--grid-points", 41, "--grid-max", 2, *extra, "--out", out)
    assert code == 0
    return io.read_output(out), captured


def test_density_grid_d3_diverges(tmp_path, capsys):
    doc, _ = _grid(tmp_path, capsys, 3, "--strip-gaussian")
    rows = doc["data"]["grid"]["rows"]
    assert rows[0][2] == math.inf
    rho = [r[2] for r in rows[1:8]]
    assert all(a > b for a, b in zip(rho, rho[1:]))


def test_density_grid_d1_vanishes(tmp_path, capsys):
    doc, _ = _grid(tmp_path, capsys, 1)
    rows = doc["data"]["grid"]["rows"]
    assert rows[0][2] == 0.0 and rows[1][2] > 0.0


def test_density_mcmc_d2_ks(tmp_path, capsys):
    doc, captured = _grid(tmp_path, capsys, 2, "--mcmc")
    assert doc["checks"]["samples"] == 100_000
    assert doc["checks"]["ks"] < 0.02
    assert "KS(|Delta| samples vs quadrature)" in captured.out


def test_verify_only_and_json(tmp_path, capsys):
    report = tmp_path / "report.json"
    code, captured = run(capsys, "verify", "--only", "gamma-det", "--json", report)
    assert code == 0
    assert captured.out.count("PASS") == 1
    doc = io.read_output(report)
    assert list(doc["checks"]) == ["gamma-det"] and doc["checks"]["gamma-det"]["passed"]


def test_verify_unknown_check_exit_2(capsys):
    code, _ = run(capsys, "verify", "--only", "no-such-check")
    assert code == 2


def test_verify_failure_exit_1(monkeypatch, capsys):
    monkeypatch.setitem(verify.CHECKS, "always-fails", lambda rng: (1.0, 0.0, 1.0, "forced"))
    code, captured = run(capsys, "verify", "--only", "always-fails")
    assert code == 1
    assert "FAIL" in captured.out
