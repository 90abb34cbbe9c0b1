"""CSV/JSON writers.  Files are written to a temporary path and renamed."""

from __future__ import annotations

import csv
import json
import os
import tempfile

import numpy as np

__all__ = ["write_bands_csv", "write_json", "write_scan_csv", "write_trace_csv"]


def _fmt(x):
    return format(float(x), ".17g")


def _atomic_open(path):
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", suffix=os.path.basename(path))
    return path, tmp, os.fdopen(fd, "w", newline="")


def _atomic_write(path, write_rows):
    path, tmp, fh = _atomic_open(path)
    try:
        with fh:
            write_rows(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_bands_csv(path, grid):
    """Columns ``k, E1_re, E1_im, ..., E4_re, E4_im``."""
    n = grid.bands.shape[1]
    header = ["k"] + [f"E{i + 1}_{part}" for i in range(n) for part in ("re", "im")]

    def rows(fh):
        w = csv.writer(fh)
        w.writerow(header)
        for k, band in zip(grid.k_values, grid.bands):
            w.writerow([_fmt(k)] + [_fmt(v) for z in band for v in (z.real, z.imag)])

    _atomic_write(path, rows)


def write_scan_csv(path, diagram):
    """Columns ``theta1, theta2, t2, class, flagged``."""

    def rows(fh):
        w = csv.writer(fh)
        w.writerow(["theta1", "theta2", "t2", "class", "flagged"])
        for pt in diagram.points:
            w.writerow([_fmt(pt.theta1), _fmt(pt.theta2), _fmt(pt.t2),
                        pt.kind.value, int(pt.flagged)])

    _atomic_write(path, rows)


def write_trace_csv(path, trace):
    """Columns ``time, chain, cell, intensity``; one row per time and site."""

    def rows(fh):
        w = csv.writer(fh)
        w.writerow(["time", "chain", "cell", "intensity"])
        for t, frame in zip(trace.times, trace.intensities):
            ts = _fmt(t)
            for cell in range(frame.shape[0]):
                for chain in range(frame.shape[1]):
                    w.writerow([ts, chain + 1, cell, _fmt(frame[cell, chain])])

    _atomic_write(path, rows)


def _jsonable(x):
    if isinstance(x, complex | np.complexfloating):
        return {"re": float(x.real), "im": float(x.imag)}
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            return [_jsonable(complex(v)) for v in x.ravel()]
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x).__name__}")


def dumps(obj):
    return json.dumps(obj, default=_jsonable, indent=2)


def write_json(path, obj):
    _atomic_write(path, lambda fh: fh.write(dumps(obj) + "\n"))
