import math

import numpy as np
import pytest

import eggprd


def test_scale_selection():
    assert [eggprd.select_scales(w) for w in ("daubechies-2", "daubechies-3", "coiflet-1")] == [6, 7, 7]


def test_lowpass_is_orthonormal():
    for spec in ("haar", "daubechies-2", "daubechies-3", "coiflet-1", "pollen:0.3,-1.2"):
        h = eggprd.lowpass(spec)
        assert math.isclose(h.sum(), math.sqrt(2), rel_tol=1e-12)
        assert math.isclose(float(h @ h), 1.0, rel_tol=1e-12)


def test_pollen_haar_point():
    h = np.sort(np.abs(eggprd.pollen_lowpass(math.pi / 2, math.pi / 2)))
    np.testing.assert_allclose(h, [0, 0, 0, 0, 1 / math.sqrt(2), 1 / math.sqrt(2)], atol=1e-12)


def test_round_trip():
    rng = np.random.default_rng(1)
    x = rng.standard_normal(6000)
    approx, details = eggprd.dwt(x, "daubechies-3", 7)
    assert len(details) == 7
    y = eggprd.idwt(approx, details, "daubechies-3", len(x))
    assert eggprd.prd(x, y) < 1e-8


def test_compress():
    x = np.sin(np.arange(6000) * 0.05) + 0.1 * np.random.default_rng(2).standard_normal(6000)
    r = eggprd.compress(x)
    assert r["depth"] == 7
    assert r["kept"] == r["total"] // 3
    assert r["prd_percent"] == pytest.approx(eggprd.prd(x, r["reconstruction"]))
    assert eggprd.compress(x, cr=1.0)["prd_percent"] < 1e-8
    with pytest.raises(ValueError):
        eggprd.compress(x, cr=0.5)


def test_surface_shape():
    a, b, prd = eggprd.prd_surface(eggprd.square_wave(512), depth=4, resolution=8)
    assert prd.shape == (8, 8)
    assert a[0] == pytest.approx(-math.pi)
    assert prd.min() < 1e-8


def test_statistics():
    assert eggprd.wilcoxon([0.5, 1.5, 2.5, 3.5, 4.5])["p_value"] == pytest.approx(0.0625)
    t = eggprd.paired_t([1.0, 2.0, 3.0, 4.0])
    assert t["statistic"] == pytest.approx(3.8729833462)
    row = eggprd.compare_paired([1.0, 2, 3, 4, 5], [2.0, 3.5, 3.9, 5.2, 6.1], channel=9)
    assert row["channel"] == 9
    assert row["test"] in ("paired-t", "wilcoxon")


def test_simulate_and_read(tmp_path):
    manifest = eggprd.simulate(tmp_path / "cohort", subjects=2, channels=3, duration_s=30)
    assert manifest.name == "manifest.txt"
    rec = eggprd.read_recording(tmp_path / "cohort" / "s01_basal.csv")
    assert rec["channels"].shape == (3, 300)
    assert rec["channel_ids"] == [7, 8, 9]
    with pytest.raises(eggprd.DataError):
        eggprd.read_recording(tmp_path / "missing.csv")
