import io
import math

import numpy as np
import pytest
from scipy import integrate

from platoonnet.geometry import (NetworkParams, PointPattern, VoronoiCell1D,
                                 cell_quantile, mgf_L, mgf_L0,
                                 pdf_serving_distance, pdf_tagged_cell,
                                 pdf_typical_cell, replication_rng,
                                 sample_mcp, sample_mcp_palm, sample_ppp,
                                 voronoi_1d)

LR = 0.002  # 2 RSU/km in per-meter units


class TestNetworkParams:
    def test_effective_density_default(self):
        p = NetworkParams(0.002, 0.001, 5.0, 100.0)
        assert p.lam == pytest.approx(0.005)

    def test_explicit_density_kept(self):
        p = NetworkParams(0.002, 0.001, 5.0, 100.0, lam=0.003)
        assert p.lam == 0.003

    def test_from_per_km(self):
        p = NetworkParams.from_per_km(2.0, 1.0, 5.0, 100.0)
        assert p.lambda_r == pytest.approx(0.002)
        assert p.lambda_p == pytest.approx(0.001)
        assert p.a == 100.0
        assert p.lam == pytest.approx(0.005)

    @pytest.mark.parametrize("kwargs", [
        dict(lambda_r=0.0, lambda_p=1e-3, m=5, a=100),
        dict(lambda_r=2e-3, lambda_p=-1e-3, m=5, a=100),
        dict(lambda_r=2e-3, lambda_p=1e-3, m=0, a=100),
        dict(lambda_r=2e-3, lambda_p=1e-3, m=5, a=0),
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            NetworkParams(**kwargs)


class TestPointPattern:
    def test_sorted_and_count(self):
        pat = PointPattern(np.array([3.0, -1.0, 2.0]), (-5.0, 5.0))
        assert np.all(np.diff(pat.positions) >= 0)
        assert pat.count_in(-1.0, 2.5) == 2
        assert len(pat) == 3

    def test_outside_window_rejected(self):
        with pytest.raises(ValueError):
            PointPattern(np.array([10.0]), (-5.0, 5.0))

    def test_csv_roundtrip(self):
        pat = PointPattern(np.array([-2.0, 0.5, 4.25]), (-5.0, 5.0))
        buf = io.StringIO()
        pat.to_csv(buf)
        buf.seek(0)
        back = PointPattern.from_csv(buf)
        assert back.window == pat.window
        assert np.array_equal(back.positions, pat.positions)


class TestSamplers:
    def test_ppp_reproducible(self):
        a = sample_ppp(0.01, (-1000, 1000), 42)
        b = sample_ppp(0.01, (-1000, 1000), 42)
        assert np.array_equal(a.positions, b.positions)

    def test_ppp_mean_count(self):
        counts = [len(sample_ppp(0.01, (0, 10000), replication_rng(1, i)))
                  for i in range(400)]
        assert np.mean(counts) == pytest.approx(100.0, rel=0.05)

    def test_mcp_mean_count(self):
        p = NetworkParams(LR, 0.001, 5.0, 100.0)
        counts = [len(sample_mcp(p, (0, 10000), replication_rng(2, i)))
                  for i in range(400)]
        # effective density m * lambda_p = 5/km over 10 km
        assert np.mean(counts) == pytest.approx(50.0, rel=0.06)

    def test_palm_typical_point_at_origin(self):
        p = NetworkParams(LR, 0.001, 5.0, 100.0)
        pat = sample_mcp_palm(p, (-2000, 2000), 7)
        assert pat.positions[pat.typical_index] == 0.0

    def test_palm_has_extra_cluster(self):
        p = NetworkParams(LR, 0.001, 20.0, 100.0)
        extra = [len(sample_mcp_palm(p, (-500, 500), replication_rng(3, i)))
                 - len(sample_mcp(p, (-500, 500), replication_rng(3, i)))
                 for i in range(300)]
        # typical point plus on average ~m platoon siblings
        assert np.mean(extra) > 10

    def test_rate_validation(self):
        with pytest.raises(ValueError):
            sample_ppp(-1.0, (0, 1), 0)
        with pytest.raises(ValueError):
            sample_ppp(1.0, (1, 0), 0)


class TestVoronoi:
    def test_cells_partition_window(self):
        pat = sample_ppp(0.01, (-1000, 1000), 5)
        cells = voronoi_1d(pat)
        assert cells[0].lo == -1000
        assert cells[-1].hi == 1000
        for left, right in zip(cells, cells[1:]):
            assert left.hi == pytest.approx(right.lo)
        for cell in cells:
            assert cell.lo <= cell.center <= cell.hi

    def test_center_must_be_inside(self):
        with pytest.raises(ValueError):
            VoronoiCell1D(5.0, 0.0, 1.0)


class TestCellLengthLaws:
    def test_pdfs_normalize(self):
        for pdf in (pdf_typical_cell, pdf_tagged_cell):
            val, _ = integrate.quad(lambda l: pdf(l, LR), 0, np.inf)
            assert val == pytest.approx(1.0, abs=1e-10)
        val, _ = integrate.quad(lambda r: pdf_serving_distance(r, LR),
                                0, np.inf)
        assert val == pytest.approx(1.0, abs=1e-10)

    def test_means(self):
        m_typ, _ = integrate.quad(lambda l: l * pdf_typical_cell(l, LR),
                                  0, np.inf)
        m_tag, _ = integrate.quad(lambda l: l * pdf_tagged_cell(l, LR),
                                  0, np.inf)
        assert m_typ == pytest.approx(1.0 / LR, rel=1e-9)
        assert m_tag == pytest.approx(1.5 / LR, rel=1e-9)

    @pytest.mark.parametrize("t", [-0.01, 0.0, 0.001, 0.0035])
    def test_mgfs_match_quadrature(self, t):
        # assembled with a single exponential so the integrand never
        # overflows before the density damps it
        ref_L, _ = integrate.quad(
            lambda l: 4 * LR**2 * l * math.exp((t - 2 * LR) * l), 0, np.inf)
        ref_L0, _ = integrate.quad(
            lambda l: 4 * LR**3 * l**2 * math.exp((t - 2 * LR) * l),
            0, np.inf)
        assert mgf_L(t, LR) == pytest.approx(ref_L, rel=1e-9)
        assert mgf_L0(t, LR) == pytest.approx(ref_L0, rel=1e-9)

    def test_mgf_domain(self):
        with pytest.raises(ValueError):
            mgf_L(2 * LR, LR)
        with pytest.raises(ValueError):
            mgf_L0(0.005, LR)

    def test_quantile_inverts_cdf(self):
        q = cell_quantile(0.97, LR)
        val, _ = integrate.quad(lambda l: pdf_typical_cell(l, LR), 0, q)
        assert val == pytest.approx(0.97, abs=1e-9)
        q0 = cell_quantile(0.5, LR, tagged=True)
        val, _ = integrate.quad(lambda l: pdf_tagged_cell(l, LR), 0, q0)
        assert val == pytest.approx(0.5, abs=1e-9)


def test_tagged_cell_size_biased_empirically():
    """Voronoi cells containing a random probe average ~1.5x typical."""
    rng = np.random.default_rng(2024)
    ratios = []
    for _ in range(40):
        pos = np.sort(rng.uniform(0, 1_250_000, rng.poisson(LR * 1_250_000)))
        cells = 0.5 * (pos[2:] - pos[:-2])  # interior Voronoi cells
        mids = 0.5 * (pos[1:-1] + pos[2:])  # boundaries between them
        probes = rng.uniform(pos[1], pos[-2], 200)
        idx = np.clip(np.searchsorted(mids, probes), 0, cells.size - 1)
        ratios.append(cells[idx].mean() / cells.mean())
    assert 1.45 < np.mean(ratios) < 1.55
