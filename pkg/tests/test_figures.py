import numpy as np

from oamfour.correlations import PowerScanConfig, power_scan, probability_table
from oamfour.figures import (
    save_correlation_figure,
    save_density_matrix_figure,
    save_power_scan_figure,
)
from oamfour.modes import MubBasis, dicke_state


def test_power_scan_figure(tmp_path):
    result = power_scan(PowerScanConfig(), seed=1)
    path = tmp_path / "scan.png"
    save_power_scan_figure(result, path)
    assert path.stat().st_size > 0


def test_correlation_figure(tmp_path):
    d = dicke_state(4, 2)
    theory = {b.name: probability_table(d, b) for b in MubBasis}
    path = tmp_path / "tables.png"
    save_correlation_figure(theory, None, path)
    assert path.stat().st_size > 0
    save_correlation_figure(theory, theory, tmp_path / "tables2.png")


def test_density_matrix_figure(tmp_path):
    d = dicke_state(4, 2)
    path = tmp_path / "rho.png"
    save_density_matrix_figure(np.outer(d, d.conj()), path)
    assert path.stat().st_size > 0
