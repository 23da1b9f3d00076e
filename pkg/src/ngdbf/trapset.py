"""Localized GDBF/NGDBF runs on the dominant (8,8) absorbing set of the 802.3an code.

The subgraph has 8 symbols, 20 degree-2 checks and 8 degree-1 checks.  The
external neighbor of each degree-1 check is taken as correct, so that check
reduces to s = x_j.  The correct state is all +1.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .channel import NoiseStreamKey, StreamRole, make_stream
from .decoder import GDBF_TRAPSET, NGDBF_TRAPSET, DecoderConfig, perturbation_std, sign
from .stats import Proportion, wilson_interval
from .tanner import ParityCheckMatrix

# symbol pairs (1-based) joined by a degree-2 check
TS88_EDGES = (
    (1, 2), (1, 3), (1, 4), (1, 7), (1, 8),
    (2, 3), (2, 4), (2, 7), (2, 8),
    (3, 4), (3, 5), (3, 6),
    (4, 5), (4, 6),
    (5, 6), (5, 7), (5, 8),
    (6, 7), (6, 8),
    (7, 8),
)


def ts88_graph() -> ParityCheckMatrix:
    """Rows 0-7 are the degree-1 checks (one per symbol), rows 8-27 the degree-2 checks."""
    rows = [[j] for j in range(8)] + [[a - 1, b - 1] for a, b in TS88_EDGES]
    return ParityCheckMatrix.from_check_neighbors(rows, 8, name="ts88")


_TS88 = ts88_graph()


@dataclass(frozen=True)
class TrapsetExperimentConfig:
    sigma: float = 1.0
    decoder: DecoderConfig = NGDBF_TRAPSET
    trials: int = 10_000
    record_trajectories: bool = False
    master_seed: int = 0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")

    @property
    def algorithm(self) -> str:
        return "GDBF" if self.decoder.eta == 0 else "NGDBF"


@dataclass
class TrialResult:
    success: bool
    first_correct_iteration: int | None
    y: np.ndarray
    trajectory: np.ndarray | None = field(default=None, repr=False)
    decisions: np.ndarray | None = field(default=None, repr=False)


def trial_streams(master_seed: int, trial: int, replay: int = 0) -> tuple[np.random.Generator, np.random.Generator]:
    """Channel and perturbation streams for one trial.

    ``replay`` selects the perturbation phase, so replay k of a stored y uses
    fresh perturbations while replay 0 reproduces the original trial.
    """
    ch = make_stream(NoiseStreamKey(master_seed, trial, 0, StreamRole.CHANNEL))
    pert = make_stream(NoiseStreamKey(master_seed, trial, replay + 1, StreamRole.PERTURBATION))
    return ch, pert


def _run(y: np.ndarray, sigma: float, cfg: DecoderConfig, stream: np.random.Generator | None, record: bool) -> TrialResult:
    h = _TS88
    x = sign(y)
    theta_k = np.full(8, float(cfg.theta))
    counters = np.zeros(8, dtype=np.int64)
    n0 = 2.0 * sigma * sigma
    if cfg.eta > 0:
        q = stream.standard_normal((cfg.T, 8)) * perturbation_std(cfg.eta, n0)
    else:
        q = np.zeros((cfg.T, 8))
    e_rec = np.zeros((cfg.T, 8)) if record else np.empty((0, 0))
    x_rec = np.zeros((cfg.T + 1, 8), dtype=np.int8) if record else np.empty((0, 0), dtype=np.int8)
    if record:
        x_rec[0] = x
    _, t, first_ok = _kernels.ngdbf_iterations(
        h.check_ptr, h.check_idx, h.sym_ptr, h.sym_idx,
        y, x, theta_k, counters, q,
        0, cfg.T, cfg.lam, cfg.w, cfg.T, False,
        e_rec, x_rec, record, -1,
    )
    ok = first_ok >= 0
    return TrialResult(
        success=ok,
        first_correct_iteration=int(first_ok) if ok else None,
        y=y,
        trajectory=e_rec if record else None,
        decisions=x_rec if record else None,
    )


def draw_y(sigma: float, stream: np.random.Generator) -> np.ndarray:
    return 1.0 + sigma * stream.standard_normal(8)


def run_trial(config: TrapsetExperimentConfig, trial: int = 0) -> TrialResult:
    """One localized trial; runs all T iterations and reports the first correct one."""
    ch, pert = trial_streams(config.master_seed, trial)
    y = draw_y(config.sigma, ch)
    return _run(y, config.sigma, config.decoder, pert, config.record_trajectories)


def replay(y: Sequence[float], config: TrapsetExperimentConfig, stream: np.random.Generator | None) -> TrialResult:
    """Re-run a stored initial condition with the given perturbation stream."""
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (8,):
        raise ValueError(f"stored y must have length 8, got shape {y.shape}")
    return _run(y, config.sigma, config.decoder, stream, config.record_trajectories)


@dataclass
class PairedRates:
    sigma: float
    trials: int
    gdbf: Proportion
    ngdbf: Proportion
    ngdbf_failed_y: list[tuple[int, np.ndarray]] = field(default_factory=list, repr=False)


def failure_rate(config: TrapsetExperimentConfig) -> Proportion:
    """Monte Carlo failure probability with a 95% Wilson interval."""
    if config.trials < 100:
        raise ValueError("failure_rate needs at least 100 trials")
    fails = sum(not run_trial(config, k).success for k in range(config.trials))
    return wilson_interval(fails, config.trials)


def paired_failure_rates(
    sigma: float,
    trials: int,
    master_seed: int = 0,
    gdbf: DecoderConfig = GDBF_TRAPSET,
    ngdbf: DecoderConfig = NGDBF_TRAPSET,
    archive_limit: int = 0,
) -> PairedRates:
    """GDBF and NGDBF on the same channel draws (common random numbers)."""
    if trials < 100:
        raise ValueError("need at least 100 trials")
    g_fail = n_fail = 0
    archive: list[tuple[int, np.ndarray]] = []
    for k in range(trials):
        ch, pert = trial_streams(master_seed, k)
        y = draw_y(sigma, ch)
        g_fail += not _run(y, sigma, gdbf, None, False).success
        if not _run(y, sigma, ngdbf, pert, False).success:
            n_fail += 1
            if len(archive) < archive_limit:
                archive.append((k, y))
    return PairedRates(sigma, trials, wilson_interval(g_fail, trials), wilson_interval(n_fail, trials), archive)


def collect_failures(config: TrapsetExperimentConfig, count: int, max_trials: int = 10_000_000) -> list[tuple[int, np.ndarray]]:
    """First ``count`` failing trials as (trial index, y)."""
    out = []
    for k in range(max_trials):
        r = run_trial(config, k)
        if not r.success:
            out.append((k, r.y))
            if len(out) == count:
                break
    return out


def replay_successes(y, config: TrapsetExperimentConfig, trial: int, replays: int) -> int:
    """Number of successful fresh-stream replays of a stored y (replay indices 1..replays)."""
    wins = 0
    for r in range(1, replays + 1):
        _, pert = trial_streams(config.master_seed, trial, replay=r)
        wins += replay(y, config, pert).success
    return wins


# ---- file formats ---------------------------------------------------------


def trajectory_csv(result: TrialResult, config: TrapsetExperimentConfig, label: str = "") -> str:
    """Header row naming algorithm and parameters, then one row of E_1..E_8 per iteration."""
    if result.trajectory is None:
        raise ValueError("trial was run without trajectory recording")
    d = config.decoder
    buf = io.StringIO()
    buf.write(
        f"# algorithm={config.algorithm} sigma={config.sigma} T={d.T} theta={d.theta} "
        f"lambda={d.lam} w={d.w} eta={d.eta}{' ' + label if label else ''}\n"
    )
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["iteration"] + [f"E_{k}" for k in range(1, 9)])
    for t, row in enumerate(result.trajectory):
        wr.writerow([t] + [repr(float(v)) for v in row])
    return buf.getvalue()


def read_trajectory_csv(text: str) -> tuple[str, np.ndarray]:
    lines = text.splitlines()
    header = lines[0]
    rows = list(csv.reader(lines[2:]))
    return header, np.array([[float(v) for v in r[1:]] for r in rows])


def write_archive(path: str | Path, failures: Iterable[tuple[int, np.ndarray]], master_seed: int, sigma: float) -> None:
    recs = [
        {"y": [float(v) for v in y], "master_seed": master_seed, "trial": int(k), "sigma": sigma}
        for k, y in failures
    ]
    Path(path).write_text(json.dumps(recs, indent=1))


def read_archive(path: str | Path) -> list[dict]:
    recs = json.loads(Path(path).read_text())
    for r in recs:
        if len(r["y"]) != 8:
            raise ValueError("archive record must hold 8 samples")
    return recs
