"""Series file formats, result documents and atomic output.

Formats
-------
CSV (``sphere-composition``, ``sphere``, ``euclidean``)
    One observation per row, one column per coordinate. An optional first
    row of column names is detected when it does not parse as numbers.
    Blank lines and lines starting with ``#`` are skipped.
JSON networks (``laplacian``)
    ``{"format": "adjacency" | "laplacian", "matrices": [[[...]], ...]}``.
    Adjacency matrices are converted to Laplacians ``D - A``.
JSON distributions (``wasserstein1d``)
    ``{"format": "quantiles", "quantiles": [[...], ...]}`` with values on
    the mid-levels ``(k - 1/2) / M``, or ``{"format": "curves", "grid":
    [...], "curves": [[...], ...], "M": 100}`` with sampled densities that
    are normalized by the trapezoid rule and inverted to quantiles.

Floats are written with ``repr`` precision, so writing and re-reading a
series reproduces it exactly.
"""

from __future__ import annotations

import csv
import json
import math
import os
import sys
import tempfile
from importlib import resources

import numpy as np

from .errors import InputError, InvalidAdjacencyError, InvalidCompositionError, ParseError, ValidationError
from .scan import ObjectSeries, estimate_period, penalized_loss
from .spaces import (
    EuclideanSpace,
    LaplacianSpace,
    SphereSpace,
    Wasserstein1DSpace,
    laplacian_from_adjacency,
    quantile_levels,
    sqrt_compositional_transform,
)

SCHEMA_VERSION = "1.0"
FILE_KINDS = ("sphere-composition", "sphere", "euclidean", "laplacian", "wasserstein1d")
CSV_KINDS = ("sphere-composition", "sphere", "euclidean")


# -- CSV ---------------------------------------------------------------------


def _is_number(s):
    try:
        float(s)
    except ValueError:
        return False
    return True


def read_table(path):
    """``(header, rows)`` from a numeric CSV; ``header`` is ``None`` if absent."""
    header, rows, width = None, [], None
    with open(path, newline="", encoding="utf-8") as fh:
        for lineno, fields in enumerate(csv.reader(fh), start=1):
            fields = [f.strip() for f in fields]
            if not fields or fields == [""] or fields[0].startswith("#"):
                continue
            if header is None and not rows and not all(_is_number(f) for f in fields):
                header = fields
                width = len(fields)
                continue
            if width is not None and len(fields) != width:
                raise ParseError(f"expected {width} columns, found {len(fields)}", row=lineno)
            width = len(fields)
            try:
                values = [float(f) for f in fields]
            except ValueError:
                bad = next(f for f in fields if not _is_number(f))
                raise ParseError(f"not a number: {bad!r}", row=lineno) from None
            if not all(math.isfinite(v) for v in values):
                raise ParseError("non-finite value", row=lineno)
            rows.append((lineno, values))
    if not rows:
        raise ParseError("file contains no data rows")
    return header, rows


def write_table(path, rows, header=None):
    lines = []
    if header is not None:
        lines.append(",".join(header))
    for r in np.asarray(rows, dtype=float):
        lines.append(",".join(repr(float(v)) for v in r))
    atomic_write(path, "\n".join(lines) + "\n")


# -- JSON helpers ------------------------------------------------------------


def _load_json(path):
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", row=exc.lineno) from None


def _numeric_array(value, ndim, what):
    try:
        arr = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise ParseError(f"{what} must be a rectangular array of numbers") from None
    if arr.ndim != ndim:
        raise ParseError(f"{what} must be {ndim}-dimensional, got {arr.ndim}")
    if not np.all(np.isfinite(arr)):
        raise ParseError(f"{what} contains non-finite values")
    return arr


def _document(path, allowed):
    doc = _load_json(path)
    if not isinstance(doc, dict) or doc.get("format") not in allowed:
        raise ParseError(f"top-level object with \"format\" in {list(allowed)} required")
    return doc


def dumps(obj):
    """Canonical JSON text: two-space indent, no NaN or infinity, trailing newline."""
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def atomic_write(path, text):
    """Write ``text`` to ``path`` via a temporary file and ``os.replace``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(prefix=".objper-", dir=directory)
    try:
        # mkstemp creates 0600; give the result ordinary umask permissions
        umask = os.umask(0)
        os.umask(umask)
        os.chmod(tmp, 0o666 & ~umask)
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- distributions -----------------------------------------------------------


def curves_to_quantiles(grid, curves, m=100):
    """Normalize sampled densities and invert their CDFs at the ``m`` mid-levels."""
    grid = np.asarray(grid, dtype=float)
    curves = np.atleast_2d(np.asarray(curves, dtype=float))
    if grid.ndim != 1 or grid.size < 2 or np.any(np.diff(grid) <= 0):
        raise ValidationError("grid must be strictly increasing with >= 2 points", "increasing grid")
    if curves.shape[1] != grid.size:
        raise ParseError(f"curves must have {grid.size} samples each, got {curves.shape[1]}")
    levels = quantile_levels(m)
    dx = np.diff(grid)
    out = np.empty((len(curves), m))
    for i, f in enumerate(curves):
        if np.any(f < 0):
            raise ValidationError(f"curve {i + 1} has negative mass", "nonnegative density")
        cdf = np.concatenate([[0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * dx)])
        if not cdf[-1] > 0:
            raise ValidationError(f"curve {i + 1} has zero total mass", "positive mass")
        cdf /= cdf[-1]
        # a flat CDF stretch maps to its left end
        cdf_u, first = np.unique(cdf, return_index=True)
        out[i] = np.interp(levels, cdf_u, grid[first])
    return out


# -- parse / serialize -------------------------------------------------------


def _validated(space, points, invariant):
    try:
        return ObjectSeries(space, points)
    except InputError as exc:
        raise ValidationError(str(exc), invariant) from None


def _composition_rows(rows):
    out = []
    for lineno, values in rows:
        try:
            out.append(sqrt_compositional_transform(values))
        except InvalidCompositionError as exc:
            raise ValidationError(f"row {lineno}: {exc}", "simplex") from None
    return np.array(out)


def parse_series(path, kind, **settings):
    """Read a series file of the declared ``kind`` (see :data:`FILE_KINDS`).

    ``settings`` are forwarded to the space (``tolerance``,
    ``max_iterations``, ``restarts`` for spheres). Raises
    :class:`ParseError` for malformed content and :class:`ValidationError`
    for data that parse but violate a space invariant.
    """
    if kind not in FILE_KINDS:
        raise InputError(f"unknown series kind {kind!r}; expected one of {FILE_KINDS}")
    if kind in CSV_KINDS:
        _, rows = read_table(path)
        if kind == "sphere-composition":
            pts = _composition_rows(rows)
            return _validated(SphereSpace(pts.shape[1], **settings), pts, "unit norm")
        pts = np.array([v for _, v in rows])
        if kind == "sphere":
            return _validated(SphereSpace(pts.shape[1], **settings), pts, "unit norm")
        return _validated(EuclideanSpace(pts.shape[1], **settings), pts, "finite")
    if kind == "laplacian":
        doc = _document(path, ("adjacency", "laplacian"))
        mats = _numeric_array(doc.get("matrices"), 3, "matrices")
        if doc["format"] == "adjacency":
            try:
                mats = np.array([laplacian_from_adjacency(a) for a in mats])
            except InvalidAdjacencyError as exc:
                raise ValidationError(str(exc), "symmetric nonnegative adjacency") from None
        return _validated(LaplacianSpace(mats.shape[1], **settings), mats, "graph Laplacian")
    doc = _document(path, ("quantiles", "curves"))
    if doc["format"] == "curves":
        m = doc.get("M", 100)
        if not isinstance(m, int) or m < 2:
            raise ParseError("M must be an integer >= 2")
        q = curves_to_quantiles(
            _numeric_array(doc.get("grid"), 1, "grid"), _numeric_array(doc.get("curves"), 2, "curves"), m
        )
    else:
        q = _numeric_array(doc.get("quantiles"), 2, "quantiles")
    return _validated(Wasserstein1DSpace(q.shape[1], **settings), q, "nondecreasing quantiles")


def _nested(a):
    return np.asarray(a, dtype=float).tolist()


def series_kind(series):
    """File kind that :func:`write_series` uses for ``series``."""
    return {"sphere": "sphere", "euclidean": "euclidean", "laplacian": "laplacian",
            "wasserstein1d": "wasserstein1d"}[series.space.kind]


def write_series(path, series, header=None):
    """Write ``series`` in the native format of its space; inverse of :func:`parse_series`."""
    kind = series_kind(series)
    if kind in CSV_KINDS:
        write_table(path, series.points, header)
    elif kind == "laplacian":
        atomic_write(path, dumps({"format": "laplacian", "matrices": _nested(series.points)}))
    else:
        atomic_write(path, dumps({"format": "quantiles", "quantiles": _nested(series.points)}))


def write_compositions(path, compositions, header=None):
    write_table(path, compositions, header)


def write_adjacency(path, adjacency):
    atomic_write(path, dumps({"format": "adjacency", "matrices": _nested(adjacency)}))


# -- result documents --------------------------------------------------------


def load_schema(name="result"):
    """JSON schema bundled with the package (``result`` or ``monte_carlo``)."""
    text = resources.files("objper").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def tool_info():
    from . import __version__
    from ._backend import BACKEND

    return {"name": "objper", "version": __version__, "backend": BACKEND}


def _finite_or_none(x):
    return None if x is None or math.isinf(x) else float(x)


def path_payload(path):
    return [
        {"theta": t, "lambda_lo": lo, "lambda_hi": _finite_or_none(hi)} for t, lo, hi in path.segments()
    ]


def component_payload(component):
    return {
        "period": component.period,
        "values": _nested(component.values),
        "phase_counts": [int(c) for c in component.phase_counts],
    }


def penalized_curves(result, selected_lambda, multipliers):
    """Penalized loss over all candidates at ``m * selected_lambda`` for each multiplier."""
    curves = []
    for m in multipliers:
        lam = float(m) * selected_lambda
        curves.append({
            "multiplier": float(m),
            "lambda": lam,
            "theta_hat": estimate_period(result, lam),
            "values": _nested(penalized_loss(result, lam)),
        })
    return curves


def build_result(command, config, series, result, report, component=None, multipliers=(1.0,)):
    """Assemble the ``ResultFile`` document for a scan-type command."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "tool": tool_info(),
        "command": command,
        "config": config,
        "space": {"kind": series.space.kind, "point_shape": list(series.space.point_shape)},
        "T": result.T,
        "theta_max": result.theta_max,
        "rss": _nested(result.rss),
        "lambda_path": path_payload(report.path),
        "ic": report.to_dict(),
        "selected_theta": report.selected_theta,
        "selected_lambda": report.selected_lambda,
        "penalized_loss": penalized_curves(result, report.selected_lambda, multipliers),
    }
    if component is not None:
        doc["component"] = component_payload(component)
    return doc


def write_json(path, doc):
    """Write ``doc`` atomically, or to standard output when ``path`` is ``None`` or ``-``."""
    text = dumps(doc)
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        atomic_write(path, text)


def read_result(path):
    return _load_json(path)
