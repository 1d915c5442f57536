"""Datasets: synthetic scenarios, CSV persistence and input scaling."""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, replace

import numpy as np

WANTED = "wanted"
UNWANTED = "unwanted"
SCENARIOS = ("cluster", "heavy", "overlap")

DEFAULT_TRUTH = (1.0, -2.0, 0.0, 0.5)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Samples ``(xs[i], ys[i])``; ``wanted[i]`` is False for samples to forget.

    ``x_range`` holds the raw ``(min, max)`` of x when ``xs`` has been mapped to
    ``[-1, 1]`` by :func:`normalize_x`.
    """

    xs: np.ndarray
    ys: np.ndarray
    wanted: np.ndarray
    x_range: tuple[float, float] | None = None

    def __post_init__(self):
        xs = np.asarray(self.xs, dtype=np.float64).ravel()
        ys = np.asarray(self.ys, dtype=np.float64).ravel()
        wanted = np.asarray(self.wanted, dtype=bool).ravel()
        if not (xs.size == ys.size == wanted.size):
            raise ValueError(f"xs, ys and labels differ in length: {xs.size}, {ys.size}, {wanted.size}")
        if xs.size == 0:
            raise ValueError("empty dataset")
        for name, arr in (("x", xs), ("y", ys)):
            bad = np.flatnonzero(~np.isfinite(arr))
            if bad.size:
                raise ValueError(f"{name}[{int(bad[0])}] is not finite")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "wanted", wanted)
        if self.x_range is not None:
            object.__setattr__(self, "x_range", (float(self.x_range[0]), float(self.x_range[1])))

    def __len__(self):
        return self.xs.size

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (np.array_equal(self.xs, other.xs) and np.array_equal(self.ys, other.ys)
                and np.array_equal(self.wanted, other.wanted) and self.x_range == other.x_range)

    __hash__ = None

    @property
    def n_wanted(self) -> int:
        return int(self.wanted.sum())

    @property
    def n_unwanted(self) -> int:
        return int((~self.wanted).sum())

    @property
    def labels(self) -> list[str]:
        return [WANTED if w else UNWANTED for w in self.wanted]


@dataclass(frozen=True)
class ScenarioSpec:
    """Parameters of a synthetic unlearning scenario.

    Wanted samples follow ``truth`` (polynomial coefficients, lowest power
    first) plus Gaussian noise over ``x_span``. Unwanted samples sit at
    ``truth(x) + offset`` over a scenario-specific band:

    - ``cluster``: a compact sub-interval ``unwanted_band``.
    - ``heavy``: a wider band with many unwanted samples.
    - ``overlap``: the whole ``x_span``, offset by ``+/-offset`` at random,
      so the two subsets interleave.
    """

    name: str = "cluster"
    n_wanted: int = 80
    n_unwanted: int | None = None
    noise_sd: float = 0.3
    seed: int = 0
    truth: tuple[float, ...] = DEFAULT_TRUTH
    x_span: tuple[float, float] = (-3.0, 3.0)
    unwanted_band: tuple[float, float] | None = None
    offset: float | None = None

    _DEFAULTS = {
        "cluster": {"n_unwanted": 15, "unwanted_band": (1.6, 2.4), "offset": -6.0},
        "heavy": {"n_unwanted": 60, "unwanted_band": (0.0, 3.0), "offset": -4.0},
        "overlap": {"n_unwanted": 40, "unwanted_band": None, "offset": 0.6},
    }

    def __post_init__(self):
        if self.name not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.name!r} (expected one of {', '.join(SCENARIOS)})")
        for key, value in self._DEFAULTS[self.name].items():
            if getattr(self, key) is None:
                object.__setattr__(self, key, value)
        if self.unwanted_band is None:
            object.__setattr__(self, "unwanted_band", tuple(self.x_span))
        object.__setattr__(self, "truth", tuple(float(c) for c in self.truth))
        object.__setattr__(self, "x_span", tuple(float(v) for v in self.x_span))
        object.__setattr__(self, "unwanted_band", tuple(float(v) for v in self.unwanted_band))
        if self.n_wanted < 1 or self.n_unwanted < 1:
            raise ValueError("n_wanted and n_unwanted must be positive")
        if self.name == "heavy" and 2 * self.n_unwanted < self.n_wanted:
            raise ValueError(
                f"heavy scenario needs n_unwanted >= n_wanted/2, got {self.n_unwanted} vs {self.n_wanted}"
            )
        if not self.noise_sd >= 0:
            raise ValueError(f"noise_sd must be non-negative, got {self.noise_sd}")
        if not self.x_span[0] < self.x_span[1] or not self.unwanted_band[0] <= self.unwanted_band[1]:
            raise ValueError("x_span and unwanted_band must be increasing intervals")
        if len(self.truth) == 0:
            raise ValueError("truth needs at least one coefficient")

    @classmethod
    def from_dict(cls, d: dict) -> ScenarioSpec:
        d = dict(d)
        unknown = set(d) - {f for f in cls.__dataclass_fields__ if not f.startswith("_")}
        if unknown:
            raise ValueError(f"unknown scenario option(s): {', '.join(sorted(unknown))}")
        for key in ("truth", "x_span", "unwanted_band"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("_DEFAULTS", None)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in d.items()}


def truth_curve(truth, xs) -> np.ndarray:
    return np.polynomial.polynomial.polyval(np.asarray(xs, dtype=np.float64), np.asarray(truth))


def generate(spec: ScenarioSpec) -> Dataset:
    """Draw a dataset for ``spec``; identical specs give identical datasets."""
    rng = np.random.default_rng(spec.seed)
    lo, hi = spec.x_span
    xw = np.sort(rng.uniform(lo, hi, spec.n_wanted))
    yw = truth_curve(spec.truth, xw) + spec.noise_sd * rng.standard_normal(spec.n_wanted)

    blo, bhi = spec.unwanted_band
    xu = np.sort(rng.uniform(blo, bhi, spec.n_unwanted))
    if spec.name == "overlap":
        shift = spec.offset * rng.choice([-1.0, 1.0], spec.n_unwanted)
    else:
        shift = np.full(spec.n_unwanted, spec.offset)
    yu = truth_curve(spec.truth, xu) + shift + spec.noise_sd * rng.standard_normal(spec.n_unwanted)

    xs = np.concatenate([xw, xu])
    order = np.argsort(xs, kind="stable")
    wanted = np.concatenate([np.ones(spec.n_wanted, bool), np.zeros(spec.n_unwanted, bool)])
    return Dataset(xs[order], np.concatenate([yw, yu])[order], wanted[order])


def normalize_x(ds: Dataset) -> Dataset:
    """Map x affinely onto ``[-1, 1]``; the raw range is kept in ``x_range``."""
    if ds.x_range is not None:
        raise ValueError("dataset is already normalized")
    lo, hi = float(ds.xs.min()), float(ds.xs.max())
    if not hi > lo:
        raise ValueError("cannot normalize: all x values are equal")
    return replace(ds, xs=scale_x(ds.xs, (lo, hi)), x_range=(lo, hi))


def denormalize_x(ds: Dataset) -> Dataset:
    if ds.x_range is None:
        raise ValueError("dataset is not normalized")
    return replace(ds, xs=unscale_x(ds.xs, ds.x_range), x_range=None)


def scale_x(xs, x_range) -> np.ndarray:
    lo, hi = x_range
    # anchored at lo so that lo and hi map to exactly -1 and 1
    return 2.0 * (np.asarray(xs, dtype=np.float64) - lo) / (hi - lo) - 1.0


def unscale_x(us, x_range) -> np.ndarray:
    lo, hi = x_range
    return lo + (np.asarray(us, dtype=np.float64) + 1.0) * ((hi - lo) / 2.0)


# CSV schema: header ``x,y,label``; label is ``wanted`` or ``unwanted``.
CSV_HEADER = ["x", "y", "label"]


def save_csv(ds: Dataset, path) -> None:
    """Write raw-coordinate samples with 17 significant digits."""
    if ds.x_range is not None:
        ds = denormalize_x(ds)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for x, y, label in zip(ds.xs, ds.ys, ds.labels):
            writer.writerow([f"{x:.17g}", f"{y:.17g}", label])


def load_csv(path) -> Dataset:
    xs, ys, wanted = [], [], []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty file, expected header {','.join(CSV_HEADER)}")
        header = [h.strip() for h in header]
        missing = [c for c in CSV_HEADER if c not in header]
        if missing:
            raise ValueError(f"{path}:1: missing column(s) {', '.join(missing)}")
        ix, iy, il = (header.index(c) for c in CSV_HEADER)
        for row in reader:
            line = reader.line_num
            if not row:
                continue
            if len(row) != len(header):
                raise ValueError(f"{path}:{line}: expected {len(header)} fields, got {len(row)}")
            try:
                x, y = float(row[ix]), float(row[iy])
            except ValueError:
                raise ValueError(f"{path}:{line}: non-numeric value in {row[ix]!r}, {row[iy]!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise ValueError(f"{path}:{line}: non-finite value")
            label = row[il].strip()
            if label not in (WANTED, UNWANTED):
                raise ValueError(f"{path}:{line}: unknown label {label!r} (expected wanted or unwanted)")
            xs.append(x)
            ys.append(y)
            wanted.append(label == WANTED)
    if not xs:
        raise ValueError(f"{path}: empty dataset")
    return Dataset(np.array(xs), np.array(ys), np.array(wanted, dtype=bool))
