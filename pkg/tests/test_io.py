import numpy as np
import pytest

import qrecon as qr
from qrecon import io as qio
from qrecon.errors import TraceFormatError
from qrecon.norming import SpectralData


@pytest.fixture()
def trace_pair():
    t = np.linspace(0.0, 1.0, 129)
    r0 = qr.ComplexTrace(1.0, np.exp(1j * 9.87 * t) / 3.0)
    r1 = qr.ComplexTrace(1.0, -np.exp(1j * 9.87 * t) * 1.7)
    return r0, r1


def test_trace_round_trip(tmp_path, trace_pair):
    path = tmp_path / "traces.csv"
    qio.write_traces(path, *trace_pair)
    r0, r1 = qio.read_traces(path)
    assert np.array_equal(r0.samples, trace_pair[0].samples)
    assert np.array_equal(r1.samples, trace_pair[1].samples)
    assert r0.T_obs == trace_pair[0].T_obs


def test_trace_header_whitespace_accepted(tmp_path, trace_pair):
    path = tmp_path / "traces.csv"
    qio.write_traces(path, *trace_pair)
    text = path.read_text().splitlines()
    text[0] = " t , re0 , im0 , re1 , im1 "
    path.write_text("\n".join(text) + "\n")
    r0, _ = qio.read_traces(path)
    assert np.array_equal(r0.samples, trace_pair[0].samples)


def test_trace_shuffled_rows_rejected(tmp_path, trace_pair):
    path = tmp_path / "traces.csv"
    qio.write_traces(path, *trace_pair)
    lines = path.read_text().splitlines()
    lines[5], lines[50] = lines[50], lines[5]
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(TraceFormatError, match="increase"):
        qio.read_traces(path)


def test_trace_malformed_row_names_line(tmp_path, trace_pair):
    path = tmp_path / "traces.csv"
    qio.write_traces(path, *trace_pair)
    lines = path.read_text().splitlines()
    lines[17] = "0.1,bad,0,0"
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(TraceFormatError, match="line 18"):
        qio.read_traces(path)


def test_trace_bad_header_rejected(tmp_path):
    path = tmp_path / "traces.csv"
    path.write_text("time,r0,i0,r1,i1\n0,1,0,1,0\n")
    with pytest.raises(TraceFormatError, match="header"):
        qio.read_traces(path)


def test_nonuniform_grid_rejected(tmp_path, trace_pair):
    path = tmp_path / "traces.csv"
    qio.write_traces(path, *trace_pair)
    lines = path.read_text().splitlines()
    cells = lines[40].split(",")
    cells[0] = repr(float(cells[0]) + 2e-4)
    lines[40] = ",".join(cells)
    path.write_text("\n".join(lines) + "\n")
    with pytest.raises(TraceFormatError, match="uniform"):
        qio.read_traces(path)


def test_extracted_round_trip(tmp_path, free_extraction):
    path = tmp_path / "extracted.json"
    qio.write_extracted(path, free_extraction)
    back = qio.read_extracted(path)
    assert np.array_equal(back.lambdas, free_extraction.lambdas)
    assert np.array_equal(back.left_products, free_extraction.left_products)
    assert np.array_equal(back.right_products, free_extraction.right_products)
    assert np.array_equal(back.residuals, free_extraction.residuals)


def test_spectral_round_trip(tmp_path):
    ks = np.arange(1, 6, dtype=float)
    sd = SpectralData(np.pi**2 * ks**2, (-1.0) ** ks,
                      1.0 / (2 * np.pi**2 * ks**2), N_used=777, epsilon_used=0.01)
    path = tmp_path / "spectral.json"
    qio.write_spectral(path, sd)
    back = qio.read_spectral(path)
    assert np.array_equal(back.lambdas, sd.lambdas)
    assert np.array_equal(back.alpha2, sd.alpha2)
    assert back.N_used == 777 and back.epsilon_used == 0.01


def test_kernel_binary_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    vals = rng.standard_normal((65, 65))
    vals = 0.5 * (vals + vals.T)
    kg = qr.KernelGrid(tau=0.75, m=64, values=vals)
    path = tmp_path / "kernel.bin"
    qio.write_kernel(path, kg)
    back = qio.read_kernel(path)
    assert back.m == 64 and back.tau == 0.75
    assert np.array_equal(back.values, vals)
    # 16-byte header then row-major doubles
    assert path.stat().st_size == 16 + 8 * 65 * 65


def test_kernel_binary_truncation_detected(tmp_path):
    kg = qr.KernelGrid(tau=1.0, m=64, values=np.zeros((65, 65)))
    path = tmp_path / "kernel.bin"
    qio.write_kernel(path, kg)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(TraceFormatError):
        qio.read_kernel(path)


def test_potential_csv_round_trip(tmp_path):
    g = qr.GridFunction.from_callable(lambda x: 5.0 + np.sin(3 * x), 64)
    path = tmp_path / "potential.csv"
    qio.write_potential(path, g, tmp_path / "potential.json", {"note": 1})
    back = qio.read_potential(path)
    assert np.array_equal(back.values, g.values)


def test_source_csv_columns(tmp_path, free_sys):
    est = qr.reconstruct_source(np.array([1.0 + 0.5j]), free_sys)
    path = tmp_path / "source.csv"
    qio.write_source(path, est)
    header = path.read_text().splitlines()[0]
    assert header == "x,ahat_re,ahat_im"
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert np.max(np.abs(data[:, 1] + 1j * data[:, 2] - est.series)) < 1e-15
