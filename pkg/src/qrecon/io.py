"""File formats: trace CSV, JSON artifacts, kernel binary, run manifest."""

import hashlib
import json
import struct
from dataclasses import dataclass

import numpy as np

from .errors import TraceFormatError
from .grids import GridFunction
from .kernel import KernelGrid
from .norming import SpectralData
from .simulate import ComplexTrace

TRACE_HEADER = ["t", "re0", "im0", "re1", "im1"]
FLOAT_FMT = "%.17g"


@dataclass
class ExtractedArrays:
    """Extraction artifact loaded back from JSON as plain arrays."""

    lambdas: np.ndarray
    left_products: np.ndarray
    right_products: np.ndarray
    residuals: np.ndarray

    def __len__(self):
        return len(self.lambdas)


def write_traces(path, r0, r1):
    """Write the trace pair as CSV with full double precision."""
    if r0.M != r1.M or r0.T_obs != r1.T_obs:
        raise TraceFormatError("trace pair must share one time grid")
    t = r0.t
    with open(path, "w") as fh:
        fh.write(",".join(TRACE_HEADER) + "\n")
        for i in range(len(t)):
            row = (t[i], r0.samples[i].real, r0.samples[i].imag,
                   r1.samples[i].real, r1.samples[i].imag)
            fh.write(",".join(FLOAT_FMT % v for v in row) + "\n")


def read_traces(path):
    """Read a trace-pair CSV; rejects malformed rows and non-uniform grids."""
    with open(path) as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise TraceFormatError(f"{path}: empty file")
    header = [c.strip() for c in lines[0].split(",")]
    if header != TRACE_HEADER:
        raise TraceFormatError(f"{path}: line 1: expected header {','.join(TRACE_HEADER)}")
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = [c.strip() for c in line.split(",")]
        if len(cells) != 5:
            raise TraceFormatError(f"{path}: line {lineno}: expected 5 columns, got {len(cells)}")
        try:
            rows.append([float(c) for c in cells])
        except ValueError:
            raise TraceFormatError(f"{path}: line {lineno}: non-numeric cell") from None
    data = np.asarray(rows)
    if len(data) < 2:
        raise TraceFormatError(f"{path}: need at least 2 samples")
    t = data[:, 0]
    dt = t[1] - t[0]
    if dt <= 0 or np.any(np.diff(t) <= 0):
        raise TraceFormatError(f"{path}: time column must increase strictly")
    if np.max(np.abs(np.diff(t) - dt)) > 1e-9 * max(t[-1], 1.0):
        raise TraceFormatError(f"{path}: time grid is not uniform")
    if abs(t[0]) > 1e-12:
        raise TraceFormatError(f"{path}: time grid must start at 0")
    T_obs = float(t[-1])
    r0 = ComplexTrace(T_obs, data[:, 1] + 1j * data[:, 2])
    r1 = ComplexTrace(T_obs, data[:, 3] + 1j * data[:, 4])
    return r0, r1


def write_extracted(path, data):
    """Extracted-data JSON: eigenvalues, both endpoint products, residuals."""
    p0 = data.left_products
    p1 = data.right_products
    payload = {
        "lambda": data.lambdas.tolist(),
        "p0_re": p0.real.tolist(),
        "p0_im": p0.imag.tolist(),
        "p1_re": p1.real.tolist(),
        "p1_im": p1.imag.tolist(),
        "residual": data.residuals.tolist(),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def read_extracted(path):
    """Read extracted-data JSON back as an ExtractedArrays record."""
    with open(path) as fh:
        payload = json.load(fh)
    try:
        lam = np.asarray(payload["lambda"], dtype=float)
        p0 = np.asarray(payload["p0_re"], dtype=float) + 1j * np.asarray(payload["p0_im"], dtype=float)
        p1 = np.asarray(payload["p1_re"], dtype=float) + 1j * np.asarray(payload["p1_im"], dtype=float)
        res = np.asarray(payload.get("residual", np.zeros(len(lam))), dtype=float)
    except KeyError as exc:
        raise TraceFormatError(f"{path}: missing field {exc}") from None
    if not len(lam) == len(p0) == len(p1):
        raise TraceFormatError(f"{path}: field lengths disagree")
    return ExtractedArrays(lambdas=lam, left_products=p0, right_products=p1,
                           residuals=res)


def write_spectral(path, sd):
    payload = {
        "lambda": sd.lambdas.tolist(),
        "A": sd.A.tolist(),
        "alpha2": sd.alpha2.tolist(),
        "N": int(sd.N_used),
        "epsilon": float(sd.epsilon_used),
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)


def read_spectral(path):
    with open(path) as fh:
        payload = json.load(fh)
    try:
        return SpectralData(
            lambdas=np.asarray(payload["lambda"], dtype=float),
            A=np.asarray(payload["A"], dtype=float),
            alpha2=np.asarray(payload["alpha2"], dtype=float),
            N_used=int(payload["N"]),
            epsilon_used=float(payload["epsilon"]),
        )
    except KeyError as exc:
        raise TraceFormatError(f"{path}: missing field {exc}") from None


def write_kernel(path, kg):
    """Flat binary: 8-byte little-endian m, 8-byte double tau, row-major doubles."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<qd", kg.m, kg.tau))
        fh.write(np.ascontiguousarray(kg.values, dtype="<f8").tobytes())


def read_kernel(path):
    with open(path, "rb") as fh:
        head = fh.read(16)
        if len(head) != 16:
            raise TraceFormatError(f"{path}: truncated kernel header")
        m, tau = struct.unpack("<qd", head)
        body = np.frombuffer(fh.read(), dtype="<f8")
    if len(body) != (m + 1) * (m + 1):
        raise TraceFormatError(f"{path}: kernel body has {len(body)} doubles, "
                               f"expected {(m + 1) * (m + 1)}")
    return KernelGrid(tau=float(tau), m=int(m), values=body.reshape(m + 1, m + 1).copy())


def write_potential(path, qhat, sidecar_path=None, diagnostics=None):
    """Reconstruction CSV x,qhat plus an optional JSON diagnostics sidecar."""
    x = qhat.x
    with open(path, "w") as fh:
        fh.write("x,qhat\n")
        for xi, qi in zip(x, qhat.values):
            fh.write(f"{FLOAT_FMT % xi},{FLOAT_FMT % qi}\n")
    if sidecar_path is not None:
        with open(sidecar_path, "w") as fh:
            json.dump(diagnostics or {}, fh, indent=1, default=_json_default)


def read_potential(path):
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    if data.ndim != 2 or data.shape[1] != 2:
        raise TraceFormatError(f"{path}: expected two columns x,qhat")
    return GridFunction(data[:, 1])


def write_source(path, est):
    """Recovered initial data CSV x,ahat_re,ahat_im."""
    x = est.grid.x
    with open(path, "w") as fh:
        fh.write("x,ahat_re,ahat_im\n")
        for xi, vi in zip(x, est.series):
            fh.write(f"{FLOAT_FMT % xi},{FLOAT_FMT % vi.real},{FLOAT_FMT % vi.imag}\n")


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _json_default(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def write_manifest(path, manifest):
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True, default=_json_default)
