"""FRED-format series: parsing, caching, vendored snapshot and monthly assembly."""
from __future__ import annotations

import csv
import io
import math
import os
import tempfile
import time
import urllib.request
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .errors import (MalformedHeader, NetworkUnavailable, NonMonotoneDates, RangeNotCovered,
                     SnapshotMissing, StaleCacheWarning, UnparsableRow)
from .flows import MonthObs

FRED_URL = "https://fred.stlouisfed.org/graph/fredgraph.csv?id={id}"
SNAPSHOT_DIR = Path(__file__).with_name("data") / "fred"
DEFAULT_RANGE = ("2000-12", "2023-05")
STALE_AFTER_DAYS = 30.0


@dataclass(frozen=True)
class SeriesSpec:
    fred_id: str
    units: str  # "thousands" or "percent"
    role: str

    @property
    def scale(self) -> float:
        return 1000.0 if self.units == "thousands" else 1.0


SERIES = {
    "JTSHIL": SeriesSpec("JTSHIL", "thousands", "hires"),
    "PAYEMS": SeriesSpec("PAYEMS", "thousands", "employment"),
    "UNEMPLOY": SeriesSpec("UNEMPLOY", "thousands", "unemployment"),
    "JTSJOL": SeriesSpec("JTSJOL", "thousands", "vacancies"),
    "UNRATE": SeriesSpec("UNRATE", "percent", "unemployment_rate"),
}


@dataclass
class DatedSeries:
    """Monthly observations keyed by 'YYYY-MM'; gaps are stored as NaN."""

    fred_id: str
    dates: list = field(default_factory=list)
    values: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return dict(zip(self.dates, self.values))

    def gaps(self) -> list:
        return [d for d, v in zip(self.dates, self.values) if math.isnan(v)]

    def __len__(self):
        return len(self.dates)


def _month(text: str) -> str:
    text = text.strip()
    parts = text.split("-")
    if len(parts) != 3 or len(parts[0]) != 4:
        raise ValueError(text)
    y, m, d = (int(p) for p in parts)
    if not (1 <= m <= 12 and 1 <= d <= 31):
        raise ValueError(text)
    return f"{y:04d}-{m:02d}"


def parse_fred_csv(data: bytes | str) -> DatedSeries:
    """Parse a FRED graph export (``DATE,<ID>`` or ``observation_date,<ID>``)."""
    if isinstance(data, bytes):
        data = data.decode("utf-8-sig")
    rows = csv.reader(io.StringIO(data))
    try:
        header = next(rows)
    except StopIteration:
        raise MalformedHeader("empty file") from None
    if len(header) != 2 or header[0].strip() not in ("DATE", "observation_date") or not header[1].strip():
        raise MalformedHeader(f"expected 'DATE,<ID>' header, got {header!r}")
    out = DatedSeries(header[1].strip())
    for lineno, row in enumerate(rows, start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise UnparsableRow(lineno, ",".join(row))
        try:
            month = _month(row[0])
            raw = row[1].strip()
            value = math.nan if raw in (".", "") else float(raw)
        except ValueError:
            raise UnparsableRow(lineno, ",".join(row)) from None
        if out.dates and month <= out.dates[-1]:
            raise NonMonotoneDates(f"line {lineno}: {month} does not follow {out.dates[-1]}")
        out.dates.append(month)
        out.values.append(value)
    return out


def _fmt_value(v: float) -> str:
    if math.isnan(v):
        return "."
    return repr(float(v)) if v != int(v) else str(int(v))


def serialize_fred_csv(series: DatedSeries, date_header: str = "observation_date") -> str:
    lines = [f"{date_header},{series.fred_id}"]
    lines += [f"{d}-01,{_fmt_value(v)}" for d, v in zip(series.dates, series.values)]
    return "\n".join(lines) + "\n"


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read_meta(path: Path) -> dict:
    meta = {}
    if path.exists():
        for line in path.read_text().splitlines():
            if "=" in line:
                k, v = line.split("=", 1)
                meta[k.strip()] = v.strip()
    return meta


def _default_opener(url: str, timeout: float) -> bytes:
    with urllib.request.urlopen(url, timeout=timeout) as resp:
        return resp.read()


def fetch_series(spec: SeriesSpec | str, cache_dir=None, offline: bool = True,
                 snapshot_dir=SNAPSHOT_DIR, opener: Callable | None = None,
                 timeout: float = 30.0, stale_after_days: float = STALE_AFTER_DAYS,
                 now: float | None = None) -> DatedSeries:
    """Load a series, preferring local copies.

    Lookup order: ``cache_dir/<ID>.csv``, the vendored snapshot, then (only
    when ``offline`` is false) an HTTP GET of the FRED CSV endpoint whose
    payload is cached atomically together with a ``<ID>.meta`` sidecar.
    """
    fred_id = spec.fred_id if isinstance(spec, SeriesSpec) else str(spec)
    now = time.time() if now is None else now
    cached = Path(cache_dir) / f"{fred_id}.csv" if cache_dir is not None else None

    if cached is not None and cached.exists():
        meta = _read_meta(cached.with_suffix(".meta"))
        stamp = float(meta.get("retrieved_unix", "nan"))
        if not offline and not (now - stamp <= stale_after_days * 86400.0):
            warnings.warn(f"cached {fred_id} is older than {stale_after_days:g} days", StaleCacheWarning,
                          stacklevel=2)
        return parse_fred_csv(cached.read_bytes())

    if snapshot_dir is not None:
        snap = Path(snapshot_dir) / f"{fred_id}.csv"
        if snap.exists():
            return parse_fred_csv(snap.read_bytes())

    if offline:
        raise NetworkUnavailable(
            f"{fred_id}: no cached copy or snapshot and offline mode is on; "
            f"place {fred_id}.csv in {cache_dir or snapshot_dir} or rerun without --offline")

    url = FRED_URL.format(id=fred_id)
    try:
        payload = (opener or _default_opener)(url, timeout)
    except OSError as exc:
        raise NetworkUnavailable(f"{fred_id}: fetch from {url} failed ({exc})") from exc
    series = parse_fred_csv(payload)
    if cached is not None:
        _atomic_write(cached, payload)
        _atomic_write(cached.with_suffix(".meta"),
                      f"retrieved_unix={now:.0f}\nsource_url={url}\n".encode())
    return series


def load_snapshot(snapshot_dir=SNAPSHOT_DIR, ids=tuple(SERIES)) -> dict:
    """Vendored series keyed by FRED id; raises SnapshotMissing if any file is absent."""
    snapshot_dir = Path(snapshot_dir)
    missing = [i for i in ids if not (snapshot_dir / f"{i}.csv").exists()]
    if missing:
        raise SnapshotMissing(f"snapshot files missing in {snapshot_dir}: {', '.join(missing)}")
    return {i: parse_fred_csv((snapshot_dir / f"{i}.csv").read_bytes()) for i in ids}


COMBINED_COLUMNS = ("date", "payems", "unemploy", "jtshil", "jtsjol", "unrate")


def read_combined_csv(path) -> dict:
    """Month-indexed CSV with one column per series (FRED units) -> dict of DatedSeries."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or set(COMBINED_COLUMNS) - set(reader.fieldnames):
            raise MalformedHeader(f"combined CSV needs columns {COMBINED_COLUMNS}, got {reader.fieldnames}")
        out = {c.upper(): DatedSeries(c.upper()) for c in COMBINED_COLUMNS[1:]}
        last = None
        for lineno, row in enumerate(reader, start=2):
            try:
                month = _month(row["date"] + "-01" if len(row["date"].strip()) == 7 else row["date"])
                vals = {c: (math.nan if row[c].strip() in (".", "") else float(row[c]))
                        for c in COMBINED_COLUMNS[1:]}
            except (ValueError, AttributeError):
                raise UnparsableRow(lineno, str(row)) from None
            if last is not None and month <= last:
                raise NonMonotoneDates(f"line {lineno}: {month} does not follow {last}")
            last = month
            for c, v in vals.items():
                out[c.upper()].dates.append(month)
                out[c.upper()].values.append(v)
    return out


def write_combined_csv(series: Mapping[str, DatedSeries], path) -> None:
    months = sorted(set().union(*(s.dates for s in series.values())))
    lookup = {k: s.as_dict() for k, s in series.items()}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COMBINED_COLUMNS)
        for m in months:
            w.writerow([m] + [_fmt_value(lookup[c.upper()].get(m, math.nan)) for c in COMBINED_COLUMNS[1:]])


def month_range(start: str, end: str) -> list:
    y0, m0 = (int(p) for p in start.split("-"))
    y1, m1 = (int(p) for p in end.split("-"))
    out = []
    y, m = y0, m0
    while (y, m) <= (y1, m1):
        out.append(f"{y:04d}-{m:02d}")
        y, m = (y + 1, 1) if m == 12 else (y, m + 1)
    return out


def parse_range(text: str) -> tuple:
    try:
        a, b = text.split(":")
        month_range(a, a)
        month_range(b, b)
    except ValueError:
        raise ValueError(f"range must look like YYYY-MM:YYYY-MM, got {text!r}") from None
    return a, b


@dataclass
class Assembled:
    months: list
    theta: np.ndarray
    vacancies: np.ndarray
    unemployment: np.ndarray

    @property
    def dates(self) -> list:
        return [m.date for m in self.months]


def assemble(series: Mapping[str, DatedSeries], start: str = DEFAULT_RANGE[0],
             end: str = DEFAULT_RANGE[1]) -> Assembled:
    """Build MonthObs records for start..end (the month after ``end`` supplies e_next).

    A month whose inputs have a gap gets a ``gap:<IDS>`` flag and NaN in
    the affected fields; nothing is interpolated.
    """
    months = month_range(start, end)
    if not months:
        raise RangeNotCovered(f"empty range {start}:{end}")
    nxt = month_range(end, "9999-12")[1]
    lookup = {}
    for fid in SERIES:
        if fid not in series:
            raise RangeNotCovered(f"series {fid} not supplied")
        d = series[fid].as_dict()
        need = months + [nxt] if fid == "PAYEMS" else months
        if need[0] not in d or need[-1] not in d:
            have = f"{series[fid].dates[0]}..{series[fid].dates[-1]}" if len(series[fid]) else "nothing"
            raise RangeNotCovered(f"{fid} covers {have}, need {need[0]}..{need[-1]}")
        lookup[fid] = d

    def get(fid, m):
        return lookup[fid].get(m, math.nan) * SERIES[fid].scale

    obs, theta, vac, unemp = [], [], [], []
    for i, m in enumerate(months):
        e_t, e_next = get("PAYEMS", m), get("PAYEMS", months[i + 1] if i + 1 < len(months) else nxt)
        hires, u, v, ur = get("JTSHIL", m), get("UNEMPLOY", m), get("JTSJOL", m), get("UNRATE", m)
        missing = [fid for fid, x in (("PAYEMS", e_t), ("PAYEMS", e_next), ("JTSHIL", hires),
                                      ("UNEMPLOY", u), ("JTSJOL", v), ("UNRATE", ur)) if math.isnan(x)]
        flag = "gap:" + "+".join(dict.fromkeys(missing)) if missing else ""
        obs.append(MonthObs(m, e_t, e_next, hires, e_t + u, u, ur, flag))
        theta.append(v / u if u > 0 and not missing else math.nan)
        vac.append(v)
        unemp.append(u)
    return Assembled(obs, np.array(theta), np.array(vac), np.array(unemp))
