"""BER/WER/latency campaigns with the 200-bit-error / 20-word-error stopping rule.

The all-zero codeword (all +1 after BPSK mapping) is transmitted in every
frame; the decoders and the channel are symmetric, so this loses nothing and
removes the need for an encoder.  Frame f draws its channel noise from
stream (seed, f, 0, channel) and the perturbations of phase p from
(seed, f, p, perturbation).  Frames are merged strictly in index order and
the stopping rule is evaluated after each frame, so statistics do not depend
on the number of workers or the chunk size.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

from . import __version__
from .channel import channel_stream, ebn0_to_sigma2, perturbation_stream, transmit
from .decoder import DecoderConfig, decode
from .refdec import NmsConfig, channel_llr, nms_decode
from .stats import Proportion, wilson_interval
from .tanner import ParityCheckMatrix, code_rate, resolve_code

log = logging.getLogger(__name__)

# clock cycles per iteration: the layered OMS benchmark needs 12, NGDBF one
OMS_CYCLES_PER_ITERATION = 12
NGDBF_CYCLES_PER_ITERATION = 1


def latency_cycles(avg_iterations: float, algorithm: str = "ngdbf") -> float:
    per = {"ngdbf": NGDBF_CYCLES_PER_ITERATION, "oms": OMS_CYCLES_PER_ITERATION}[algorithm.lower()]
    return avg_iterations * per


@dataclass(frozen=True)
class CampaignConfig:
    code: str
    decoder: DecoderConfig | NmsConfig
    ebn0_points: tuple[float, ...]
    min_bit_errors: int = 200
    min_word_errors: int = 20
    max_frames: int = 10**8
    master_seed: int = 0
    workers: int = 1
    rate: float | None = None
    chunk_frames: int = 64

    def __post_init__(self):
        if self.min_bit_errors < 1 or self.min_word_errors < 1 or self.max_frames < 1:
            raise ValueError("error thresholds and max_frames must be >= 1")
        if not self.ebn0_points:
            raise ValueError("need at least one Eb/N0 point")
        object.__setattr__(self, "ebn0_points", tuple(float(v) for v in self.ebn0_points))

    @property
    def phi(self) -> int:
        return self.decoder.phi if isinstance(self.decoder, DecoderConfig) else 1

    def to_dict(self) -> dict:
        kind = "ngdbf" if isinstance(self.decoder, DecoderConfig) else "nms"
        d = asdict(self)
        d["decoder"] = {"kind": kind, **self.decoder.to_dict()}
        d["ebn0_points"] = list(self.ebn0_points)
        return d


@dataclass(frozen=True)
class FrameRecord:
    bit_errors: int
    word_error: bool
    undetected: bool
    iterations: int
    phase: int  # phase at which decoding ended; failures land on the last phase
    phase_bit_errors: tuple[int, ...] = ()  # bit errors of each executed phase's output


@dataclass
class PointStats:
    """Integer accumulators for one Eb/N0 point; rates are derived on demand."""

    ebn0_db: float
    n: int
    phi: int
    frames: int = 0
    bit_errors: int = 0
    word_errors: int = 0
    undetected_word_errors: int = 0
    total_iterations: int = 0
    phase_counts: list[int] = field(default_factory=list)
    # errors the same frames would have had with a smaller phase budget 1..phi
    bit_errors_by_phi: list[int] = field(default_factory=list)
    word_errors_by_phi: list[int] = field(default_factory=list)
    unsaturated: bool = False
    done: bool = False

    def __post_init__(self):
        for name in ("phase_counts", "bit_errors_by_phi", "word_errors_by_phi"):
            if not getattr(self, name):
                setattr(self, name, [0] * self.phi)

    def add(self, rec: FrameRecord) -> None:
        self.frames += 1
        self.bit_errors += rec.bit_errors
        self.word_errors += int(rec.word_error)
        self.undetected_word_errors += int(rec.undetected)
        self.total_iterations += rec.iterations
        self.phase_counts[rec.phase - 1] += 1
        per_phase = rec.phase_bit_errors or (rec.bit_errors,)
        for a in range(self.phi):
            e = per_phase[min(a, len(per_phase) - 1)]
            self.bit_errors_by_phi[a] += e
            self.word_errors_by_phi[a] += int(e > 0)

    def thresholds_met(self, min_bit_errors: int, min_word_errors: int) -> bool:
        return self.bit_errors >= min_bit_errors and self.word_errors >= min_word_errors

    @property
    def ber(self) -> Proportion:
        return wilson_interval(self.bit_errors, self.frames * self.n)

    @property
    def wer(self) -> Proportion:
        return wilson_interval(self.word_errors, self.frames)

    @property
    def avg_iterations(self) -> float:
        return self.total_iterations / self.frames

    @property
    def avg_latency(self) -> float:
        return latency_cycles(self.avg_iterations)

    def phase_fractions(self) -> list[float]:
        return phase_histogram(self)

    def ber_at_phi(self, phi: int) -> Proportion:
        """BER on these frames had decoding stopped after ``phi`` phases."""
        return wilson_interval(self.bit_errors_by_phi[phi - 1], self.frames * self.n)


def phase_histogram(stats: PointStats) -> list[float]:
    """Fraction of frames whose decoding ended at each phase 1..phi."""
    return [c / stats.frames for c in stats.phase_counts]


def simulate_frame(
    h: ParityCheckMatrix, decoder: DecoderConfig | NmsConfig, sigma2: float, master_seed: int, frame: int
) -> FrameRecord:
    y = transmit(np.ones(h.n), sigma2, channel_stream(master_seed, frame))
    if isinstance(decoder, NmsConfig):
        res = nms_decode(h, channel_llr(y, sigma2) if sigma2 > 0 else y * 1e6, decoder)
        out, ok, iters, phase = res.output, res.success, res.iterations, 1
        per_phase = ()
    else:
        n0 = 2.0 * sigma2 if sigma2 > 0 else 1e-300
        res = decode(h, y, n0, decoder, lambda p: perturbation_stream(master_seed, frame, p))
        out, ok, iters, phase = res.output, res.success, res.total_iterations, res.phases_used
        per_phase = tuple(int(np.count_nonzero(r.output < 0)) for r in res.phases)
    errs = int(np.count_nonzero(out < 0))
    return FrameRecord(errs, errs > 0, ok and errs > 0, iters, phase, per_phase)


def _simulate_chunk(args) -> list[FrameRecord]:
    code, decoder, sigma2, seed, start, stop = args
    h = resolve_code(code)
    return [simulate_frame(h, decoder, sigma2, seed, f) for f in range(start, stop)]


def _chunk_results(campaign: CampaignConfig, sigma2: float, start: int, pool) -> Iterator[list[FrameRecord]]:
    """Yield per-chunk frame records in frame order, from ``start`` up to max_frames."""
    size = campaign.chunk_frames
    bounds = [(s, min(s + size, campaign.max_frames)) for s in range(start, campaign.max_frames, size)]
    job = lambda b: (campaign.code, campaign.decoder, sigma2, campaign.master_seed, b[0], b[1])  # noqa: E731
    if pool is None:
        h = resolve_code(campaign.code)
        for a, b in bounds:
            yield [simulate_frame(h, campaign.decoder, sigma2, campaign.master_seed, f) for f in range(a, b)]
        return
    window = max(2, 2 * campaign.workers)
    pending = []
    it = iter(bounds)
    for b in it:
        pending.append(pool.submit(_simulate_chunk, job(b)))
        if len(pending) >= window:
            break
    while pending:
        fut = pending.pop(0)
        nxt = next(it, None)
        if nxt is not None:
            pending.append(pool.submit(_simulate_chunk, job(nxt)))
        yield fut.result()


def _code_rate(campaign: CampaignConfig, h: ParityCheckMatrix) -> float:
    if campaign.rate is not None:
        return campaign.rate
    return code_rate(h)


def run_point(
    campaign: CampaignConfig,
    ebn0_db: float,
    resume: PointStats | None = None,
    on_progress=None,
    pool=None,
) -> PointStats:
    """Simulate one Eb/N0 point until both error thresholds are met or max_frames is hit."""
    h = resolve_code(campaign.code)
    sigma2 = ebn0_to_sigma2(ebn0_db, _code_rate(campaign, h))
    stats = resume if resume is not None else PointStats(ebn0_db, h.n, campaign.phi)
    if stats.done:
        return stats
    own_pool = pool is None and campaign.workers > 1
    if own_pool:
        pool = ProcessPoolExecutor(max_workers=campaign.workers)
    try:
        for chunk in _chunk_results(campaign, sigma2, stats.frames, pool):
            for rec in chunk:
                stats.add(rec)
                if stats.thresholds_met(campaign.min_bit_errors, campaign.min_word_errors):
                    stats.done = True
                    break
            if on_progress is not None:
                on_progress(stats)
            if stats.done:
                break
    finally:
        if own_pool:
            pool.shutdown(cancel_futures=True)
    if not stats.done:
        stats.unsaturated = True
        stats.done = True
    log.info("Eb/N0 %.3f dB: %d frames, BER %.3e, WER %.3e", ebn0_db, stats.frames, stats.ber.p, stats.wer.p)
    return stats


def _save_checkpoint(path: Path, campaign: CampaignConfig, rows: list[PointStats]) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps({"campaign": campaign.to_dict(), "points": [asdict(r) for r in rows]}))
    os.replace(tmp, path)


def _load_checkpoint(path: Path, campaign: CampaignConfig) -> list[PointStats]:
    blob = json.loads(path.read_text())
    if blob["campaign"] != json.loads(json.dumps(campaign.to_dict())):
        raise ValueError(f"checkpoint {path} belongs to a different campaign")
    return [PointStats(**p) for p in blob["points"]]


def sweep(campaign: CampaignConfig, checkpoint: str | Path | None = None, stop_after_frames: int | None = None) -> list[PointStats]:
    """Run every Eb/N0 point in order.

    With ``checkpoint`` the integer accumulators are saved after each chunk
    and a later call resumes from them.  ``stop_after_frames`` interrupts the
    sweep once that many frames have been simulated in this call (used to
    exercise resumption); the partial state is left in the checkpoint.
    """
    ckpt = Path(checkpoint) if checkpoint is not None else None
    rows = _load_checkpoint(ckpt, campaign) if ckpt is not None and ckpt.exists() else []
    budget = [stop_after_frames]

    class _Interrupt(Exception):
        pass

    pool = ProcessPoolExecutor(max_workers=campaign.workers) if campaign.workers > 1 else None
    try:
        for idx, db in enumerate(campaign.ebn0_points):
            if idx < len(rows) and rows[idx].done:
                continue
            current = rows[idx] if idx < len(rows) else None
            if current is None:
                h = resolve_code(campaign.code)
                current = PointStats(db, h.n, campaign.phi)
                rows.append(current)
            seen = [current.frames]

            def progress(st: PointStats):
                if ckpt is not None:
                    _save_checkpoint(ckpt, campaign, rows)
                if budget[0] is not None:
                    budget[0] -= st.frames - seen[0]
                    seen[0] = st.frames
                    if budget[0] <= 0 and not st.done:
                        raise _Interrupt

            try:
                run_point(campaign, db, resume=current, on_progress=progress, pool=pool)
            except _Interrupt:
                return rows
            if ckpt is not None:
                _save_checkpoint(ckpt, campaign, rows)
    finally:
        if pool is not None:
            pool.shutdown(cancel_futures=True)
    return rows


# ---- output ---------------------------------------------------------------


def results_csv(rows: Sequence[PointStats]) -> str:
    phi = max(r.phi for r in rows)
    cols = [
        "ebn0_db", "frames", "bit_errors", "word_errors", "undetected_word_errors",
        "ber", "wer", "ber_ci_lo", "ber_ci_hi", "wer_ci_lo", "wer_ci_hi", "avg_iterations",
        *[f"phase_{p}" for p in range(1, phi + 1)], "unsaturated",
    ]
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(cols)
    for r in rows:
        ber, wer = r.ber, r.wer
        fr = r.phase_fractions() + [0.0] * (phi - r.phi)
        wr.writerow([
            repr(r.ebn0_db), r.frames, r.bit_errors, r.word_errors, r.undetected_word_errors,
            repr(ber.p), repr(wer.p), repr(ber.lo), repr(ber.hi), repr(wer.lo), repr(wer.hi),
            repr(r.avg_iterations), *[repr(v) for v in fr], int(r.unsaturated),
        ])
    return buf.getvalue()


def provenance(campaign: CampaignConfig, **extra) -> dict:
    return {"artifact": "ngdbf", "version": __version__, "campaign": campaign.to_dict(), **extra}


def write_results(rows: Sequence[PointStats], campaign: CampaignConfig, path: str | Path, **extra) -> Path:
    """Write the results CSV and a ``.json`` provenance sidecar next to it."""
    path = Path(path)
    path.write_text(results_csv(rows))
    path.with_suffix(".json").write_text(json.dumps(provenance(campaign, **extra), indent=2))
    return path
