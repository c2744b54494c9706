import math
from pathlib import Path

import pytest

from liouville_figures.cli import main
from liouville_figures.figures import SPECS, render, render_all
from liouville_figures.reader import MalformedCsv, MissingArtifact, load_table

REAL_OUT = Path(__file__).resolve().parents[2] / "out"


def write_frozen(path: Path, columns, rows):
    lines = ["# liouville-lab v0.1.0", "# command: test-fixture", ",".join(columns)]
    lines += [",".join(repr(float(x)) for x in row) for row in rows]
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", newline="\n")


def a_star(N):
    return 0.5 * math.log(2.0 * (N + 2.0))


@pytest.fixture()
def synthetic(tmp_path):
    """Structurally plausible stand-ins for all six artifacts."""
    rows1 = []
    for k, sign in ((2, 1), (2, -1), (3, 1), (3, -1)):
        N_k = k * (k + 1) - 2
        for i in range(8):
            s = 0.1 * (i + 1)
            N = N_k + (0.3 * s if sign < 0 else -0.3 * s)
            a = a_star(N) + sign * s
            rows1.append([k, sign, s, N, a, a - a_star(N), 2 * (N + 2), k])
    write_frozen(tmp_path / "fig1.csv",
                 ["k", "sign", "s", "N", "a", "f_at_zero", "mu", "zero_count"], rows1)

    rows2, rows3 = [], []
    for N in [25.0] + [float(n) for n in range(1, 13)]:
        for i in range(30):
            a = -6.0 + 0.5 * i
            alpha = 2 * N + 2 - (N - 1) * (math.tanh(a - 1.0) + 1.0) / 2.0
            rows2.append([N, a, alpha])
            rows3.append([N, a, alpha - 2 * N])
    write_frozen(tmp_path / "fig2.csv", ["N", "a", "alpha"], rows2)
    write_frozen(tmp_path / "fig3.csv", ["N", "a", "alpha_minus_2N"], rows3)

    rows4 = [[N, 1.0 + 0.1 * N, (N + 2.0) / (4.0 * N), 2]
             for N in [2.0 + 0.5 * i for i in range(20)]]
    write_frozen(tmp_path / "fig4.csv",
                 ["N", "critical_a", "critical_value_over_4N", "epsilon"], rows4)

    rows5 = [[N, a, math.sin(a)] for N in (1.0, 3.0, 5.0)
             for a in [0.1 * i for i in range(40)]]
    write_frozen(tmp_path / "fig5.csv", ["N", "a", "J"], rows5)
    rows5c = [[N, a_star(N) + 0.3, a_star(N)] for N in [2.5 + 0.5 * i for i in range(30)]]
    write_frozen(tmp_path / "fig5_cn.csv", ["N", "c_of_N", "a_star"], rows5c)

    rows6 = [[N, abs(math.sin(N)), math.cos(N)] for N in [2.5 + 0.5 * i for i in range(30)]]
    write_frozen(tmp_path / "fig6.csv", ["N", "J_at_astar", "K_at_astar"], rows6)
    return tmp_path


@pytest.mark.parametrize("fid", sorted(SPECS))
def test_render_each_figure(fid, synthetic, tmp_path):
    out = render(fid, synthetic, tmp_path / "figs")
    assert out.exists() and out.stat().st_size > 1000
    assert out.suffix == ".pdf"


def test_render_all_produces_six(synthetic, tmp_path):
    paths = render_all(synthetic, tmp_path / "figs")
    assert len(paths) == 6
    assert sorted(p.name for p in paths) == [f"fig{i}.pdf" for i in range(1, 7)]


def test_rendering_is_deterministic(synthetic, tmp_path):
    a = render(6, synthetic, tmp_path / "one")
    b = render(6, synthetic, tmp_path / "two")
    assert a.read_bytes() == b.read_bytes()


def test_png_fallback(synthetic, tmp_path):
    rc = main(["--in-dir", str(synthetic), "--out-dir", str(tmp_path / "figs"),
               "--png", "fig2"])
    assert rc == 0
    assert (tmp_path / "figs" / "fig2.png").exists()


def test_missing_artifact(tmp_path, capsys):
    rc = main(["--in-dir", str(tmp_path / "nowhere"), "--out-dir",
               str(tmp_path / "figs"), "render-all"])
    assert rc == 3
    assert "MissingArtifact" in capsys.readouterr().err


def test_malformed_csv_rejected(tmp_path):
    bad = tmp_path / "fig6.csv"
    bad.write_text("# liouville-lab v0.1.0\nN,wrong,columns\n1,2,3\n")
    with pytest.raises(MalformedCsv):
        render(6, tmp_path, tmp_path / "figs")
    bad.write_text("no banner\nN,J_at_astar,K_at_astar\n1,2,3\n")
    with pytest.raises(MalformedCsv):
        render(6, tmp_path, tmp_path / "figs")


def test_reader_validates_cells(tmp_path):
    p = tmp_path / "fig6.csv"
    p.write_text("# liouville-lab v0.1.0\nN,J_at_astar,K_at_astar\n1,2,oops\n")
    with pytest.raises(MalformedCsv):
        load_table(p, ["N", "J_at_astar", "K_at_astar"])


@pytest.mark.skipif(not (REAL_OUT / "fig1.csv").exists(),
                    reason="real artifacts not generated")
def test_render_all_on_real_artifacts(tmp_path):
    paths = render_all(REAL_OUT, tmp_path / "figs")
    assert len(paths) == 6
    for p in paths:
        assert p.stat().st_size > 2000
