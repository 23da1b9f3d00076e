"""Command-line front end.

    ngdbf validate-code CODE
    ngdbf decode   --code CODE [--config FILE] [--set k=v ...] (--ebn0 DB | --y FILE | --archive FILE)
    ngdbf sweep    --code CODE --ebn0 2.5 3.0 ... --output results.csv
    ngdbf trapset  --sigma 0.6 0.8 1.0 --trials N --output table.csv [--record DIR] [--archive FILE]
    ngdbf replay   --archive FILE --replays N --output replays.csv

CODE is a bundled short name (hamming7, toy96, peg1008, ieee8023an, ts88) or
a path to an alist file.  Config files are flat JSON objects whose keys are
the decoder parameter names (T, theta, lambda, w, eta, y_max,
smoothing_window, phi for NGDBF; T, alpha for the min-sum reference).
Every output file gets a ``.json`` provenance sidecar with the resolved
configuration, the overrides as given, the seed and the package version.

Exit status: 0 success, 1 decoding failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .channel import channel_stream, ebn0_to_sigma2, perturbation_stream, transmit
from .decoder import NGDBF_TRAPSET, DecoderConfig, decode
from .montecarlo import CampaignConfig, sweep, write_results
from .refdec import NmsConfig
from .tanner import AlistError, ParityCheckMatrix, code_rate, degree_summary, resolve_code
from . import trapset

WORKERS_ENV = "NGDBF_WORKERS"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _load_code(ref: str) -> ParityCheckMatrix:
    if ref == "ts88":
        return trapset.ts88_graph()
    try:
        return resolve_code(ref)
    except FileNotFoundError:
        raise UsageError(f"code file not found: {ref}") from None
    except AlistError as e:
        raise UsageError(f"{ref}: {e}") from None


def _parse_overrides(pairs: list[str] | None) -> dict[str, str]:
    out = {}
    for p in pairs or []:
        if "=" not in p:
            raise UsageError(f"override {p!r} is not of the form key=value")
        k, v = p.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _coerce(v: str):
    if v.lower() in ("none", "null", ""):
        return None
    try:
        return json.loads(v)
    except json.JSONDecodeError:
        return v


def load_config(path: str | None, overrides: dict[str, str], cls, base=None):
    """Read a flat JSON config, apply key=value overrides, build ``cls``."""
    data = dict(base.to_dict()) if base is not None else {}
    if path:
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise UsageError(f"config file not found: {path}") from None
        except json.JSONDecodeError as e:
            raise UsageError(f"{path}: malformed JSON ({e})") from None
        if not isinstance(raw, dict):
            raise UsageError(f"{path}: config must be a JSON object")
        data.update(raw)
    data.update({k: _coerce(v) for k, v in overrides.items()})
    unknown = sorted(set(data) - set(cls.KEYS))
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    try:
        return cls.from_dict(data)
    except (TypeError, ValueError) as e:
        raise UsageError(f"invalid config: {e}") from None


def _workers(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(WORKERS_ENV)
    return int(env) if env else 1


def _write_provenance(path: Path, command: str, **fields) -> None:
    rec = {"artifact": "ngdbf", "version": __version__, "command": command, **fields}
    path.with_suffix(".json").write_text(json.dumps(rec, indent=2))


def _read_vector(path: str) -> np.ndarray:
    try:
        return np.loadtxt(path, dtype=np.float64, ndmin=1)
    except OSError:
        raise UsageError(f"cannot read vector file {path}") from None
    except ValueError as e:
        raise UsageError(f"{path}: {e}") from None


# ---- subcommands ----------------------------------------------------------


def cmd_validate_code(args) -> int:
    h = _load_code(args.code)
    ok = h.is_transpose_consistent() and bool(np.all(h.check_degrees >= 1))
    dv = dict(zip(*np.unique(h.symbol_degrees, return_counts=True)))
    dc = dict(zip(*np.unique(h.check_degrees, return_counts=True)))
    print(f"{degree_summary(h)}, n={h.n}, m={h.m}, {'OK' if ok else 'INCONSISTENT'}")
    print("symbol degrees: " + ", ".join(f"{int(d)}:{int(c)}" for d, c in dv.items()))
    print("check degrees: " + ", ".join(f"{int(d)}:{int(c)}" for d, c in dc.items()))
    if args.rank:
        print(f"rank={h.gf2_rank()} rate={code_rate(h):.4f}")
    return EXIT_OK if ok else EXIT_USAGE


def cmd_decode(args) -> int:
    h = _load_code(args.code)
    overrides = _parse_overrides(args.set)
    cfg = load_config(args.config, overrides, DecoderConfig)
    seed = args.seed
    if args.y is not None:
        y = _read_vector(args.y)
    elif args.archive is not None:
        recs = trapset.read_archive(args.archive)
        if not 0 <= args.index < len(recs):
            raise UsageError(f"archive has {len(recs)} records; index {args.index} out of range")
        rec = recs[args.index]
        y = np.asarray(rec["y"], dtype=np.float64)
        if args.sigma is None and "sigma" in rec:
            args.sigma = rec["sigma"]
    elif args.ebn0 is not None:
        rate = args.rate if args.rate is not None else code_rate(h)
        s2 = ebn0_to_sigma2(args.ebn0, rate)
        y = transmit(np.ones(h.n), s2, channel_stream(seed, args.frame))
        args.sigma = float(np.sqrt(s2))
    else:
        raise UsageError("give one of --y, --archive or --ebn0")
    if y.shape != (h.n,):
        raise UsageError(f"received vector has length {y.size}, code has n={h.n}")
    if cfg.eta > 0 and not args.sigma:
        raise UsageError("NGDBF (eta > 0) needs the channel noise level: pass --sigma or --ebn0")
    n0 = 2.0 * args.sigma**2 if args.sigma else 1.0

    res = decode(h, y, n0, cfg, lambda p: perturbation_stream(seed, args.frame, p))
    print(f"success={str(res.success).lower()} phases_used={res.phases_used} total_iterations={res.total_iterations}")
    if args.output:
        out = Path(args.output)
        out.write_text("\n".join(str(int(v)) for v in res.output) + "\n")
        _write_provenance(
            out, "decode", code=args.code, config=cfg.to_dict(), overrides=overrides, seed=seed,
            frame=args.frame, success=res.success, phases_used=res.phases_used,
            total_iterations=res.total_iterations,
        )
    return EXIT_OK if res.success else EXIT_FAIL


def cmd_sweep(args) -> int:
    overrides = _parse_overrides(args.set)
    if args.decoder == "nms":
        dec = load_config(args.config, overrides, NmsConfig)
    else:
        dec = load_config(args.config, overrides, DecoderConfig)
        if args.phi is not None:
            dec = dec.with_(phi=args.phi)
    _load_code(args.code)  # fail early on a bad code reference
    campaign = CampaignConfig(
        code=args.code,
        decoder=dec,
        ebn0_points=tuple(args.ebn0),
        min_bit_errors=args.min_bit_errors,
        min_word_errors=args.min_word_errors,
        max_frames=args.max_frames,
        master_seed=args.seed,
        workers=_workers(args.workers),
        rate=args.rate,
    )
    rows = sweep(campaign, checkpoint=args.checkpoint, stop_after_frames=args.stop_after_frames)
    if len(rows) < len(campaign.ebn0_points) or not all(r.done for r in rows):
        print(f"interrupted; partial state saved in {args.checkpoint}", file=sys.stderr)
        return EXIT_OK
    write_results(rows, campaign, args.output, overrides=overrides)
    for r in rows:
        flag = " (unsaturated)" if r.unsaturated else ""
        print(f"{r.ebn0_db:.3f} dB  frames={r.frames}  BER={r.ber.p:.3e}  WER={r.wer.p:.3e}  avg_it={r.avg_iterations:.2f}{flag}")
    return EXIT_OK


def _trapset_configs(args, overrides):
    ng = load_config(args.config, overrides, DecoderConfig, base=NGDBF_TRAPSET)
    return ng.with_(eta=0.0), ng


def cmd_trapset(args) -> int:
    if args.replay:
        return _replay(args.replay, args)
    overrides = _parse_overrides(args.set)
    gd, ng = _trapset_configs(args, overrides)
    out = Path(args.output)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow([
        "sigma", "trials",
        "gdbf_failures", "gdbf_rate", "gdbf_ci_lo", "gdbf_ci_hi",
        "ngdbf_failures", "ngdbf_rate", "ngdbf_ci_lo", "ngdbf_ci_hi",
    ])
    archive = []
    for sigma in args.sigma:
        r = trapset.paired_failure_rates(sigma, args.trials, args.seed, gd, ng, archive_limit=args.archive_limit)
        archive += [(sigma, k, y) for k, y in r.ngdbf_failed_y]
        wr.writerow([
            sigma, args.trials,
            r.gdbf.k, r.gdbf.p, r.gdbf.lo, r.gdbf.hi,
            r.ngdbf.k, r.ngdbf.p, r.ngdbf.lo, r.ngdbf.hi,
        ])
        print(f"sigma={sigma}: GDBF {r.gdbf.k}/{args.trials}  NGDBF {r.ngdbf.k}/{args.trials}")
        if args.record:
            rec_dir = Path(args.record)
            rec_dir.mkdir(parents=True, exist_ok=True)
            for algo, cfg in (("gdbf", gd), ("ngdbf", ng)):
                ecfg = trapset.TrapsetExperimentConfig(sigma, cfg, args.trials, True, args.seed)
                for k in range(min(args.record_count, args.trials)):
                    res = trapset.run_trial(ecfg, k)
                    (rec_dir / f"{algo}_sigma{sigma}_trial{k}.csv").write_text(
                        trapset.trajectory_csv(res, ecfg, label=f"trial={k} seed={args.seed}")
                    )
    out.write_text(buf.getvalue())
    if args.archive:
        recs = [
            {"y": [float(v) for v in y], "master_seed": args.seed, "trial": int(k), "sigma": s}
            for s, k, y in archive
        ]
        Path(args.archive).write_text(json.dumps(recs, indent=1))
    _write_provenance(
        out, "trapset", gdbf=gd.to_dict(), ngdbf=ng.to_dict(), overrides=overrides,
        seed=args.seed, trials=args.trials, sigmas=list(args.sigma),
    )
    return EXIT_OK


def _replay(archive_path: str, args) -> int:
    overrides = _parse_overrides(args.set)
    _, ng = _trapset_configs(args, overrides)
    try:
        recs = trapset.read_archive(archive_path)
    except FileNotFoundError:
        raise UsageError(f"archive not found: {archive_path}") from None
    out = Path(args.output)
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["record", "sigma", "trial", "replays", "successes", "success_fraction"])
    for idx, rec in enumerate(recs):
        ecfg = trapset.TrapsetExperimentConfig(rec["sigma"], ng, 1, False, rec["master_seed"])
        wins = trapset.replay_successes(rec["y"], ecfg, rec["trial"], args.replays)
        wr.writerow([idx, rec["sigma"], rec["trial"], args.replays, wins, wins / args.replays])
    out.write_text(buf.getvalue())
    _write_provenance(out, "replay", ngdbf=ng.to_dict(), overrides=overrides, archive=str(archive_path), replays=args.replays)
    print(f"replayed {len(recs)} stored initial conditions x {args.replays}")
    return EXIT_OK


def cmd_replay(args) -> int:
    return _replay(args.archive, args)


# ---- parser ---------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ngdbf", description="NGDBF decoding with re-decoding: simulations and experiments")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, config=True):
        if config:
            sp.add_argument("--config", help="flat JSON file of decoder parameters")
            sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key (repeatable)")
        sp.add_argument("--seed", type=int, default=0, help="master seed")

    v = sub.add_parser("validate-code", help="structural report for an alist file")
    v.add_argument("code")
    v.add_argument("--rank", action="store_true", help="also compute the GF(2) rank and true rate")
    v.set_defaults(func=cmd_validate_code)

    d = sub.add_parser("decode", help="decode a single frame")
    d.add_argument("--code", required=True)
    common(d)
    src = d.add_mutually_exclusive_group()
    src.add_argument("--y", help="text file with the received samples")
    src.add_argument("--archive", help="trapset archive (JSON) to take y from")
    src.add_argument("--ebn0", type=float, help="generate the frame at this Eb/N0 (dB)")
    d.add_argument("--index", type=int, default=0, help="record index in --archive")
    d.add_argument("--sigma", type=float, help="channel noise std (N0 = 2 sigma^2)")
    d.add_argument("--rate", type=float, help="code rate for --ebn0 (default: from H)")
    d.add_argument("--frame", type=int, default=0, help="frame index for stream keying")
    d.add_argument("--output", help="write the decision vector here")
    d.set_defaults(func=cmd_decode)

    s = sub.add_parser("sweep", help="BER/WER/latency sweep over Eb/N0")
    s.add_argument("--code", required=True)
    common(s)
    s.add_argument("--decoder", choices=("ngdbf", "nms"), default="ngdbf")
    s.add_argument("--ebn0", type=float, nargs="+", required=True)
    s.add_argument("--phi", type=int, help="maximum re-decoding phases (overrides config)")
    s.add_argument("--min-bit-errors", type=int, default=200)
    s.add_argument("--min-word-errors", type=int, default=20)
    s.add_argument("--max-frames", type=int, default=10**8)
    s.add_argument("--rate", type=float, help="code rate for Eb/N0 (default: from H)")
    s.add_argument("--workers", type=int, help=f"worker processes (default ${WORKERS_ENV} or 1)")
    s.add_argument("--checkpoint", help="checkpoint file for resumable sweeps")
    s.add_argument("--stop-after-frames", type=int, help=argparse.SUPPRESS)
    s.add_argument("--output", required=True)
    s.set_defaults(func=cmd_sweep)

    t = sub.add_parser("trapset", help="paired GDBF/NGDBF runs on the (8,8) absorbing set")
    common(t)
    t.add_argument("--sigma", type=float, nargs="+", default=[0.6, 0.8, 1.0])
    t.add_argument("--trials", type=int, default=10_000)
    t.add_argument("--record", metavar="DIR", help="write per-trial trajectory CSVs here")
    t.add_argument("--record-count", type=int, default=10, help="trials recorded per sigma and algorithm")
    t.add_argument("--archive", help="write failing NGDBF initial conditions (JSON)")
    t.add_argument("--archive-limit", type=int, default=1000)
    t.add_argument("--replay", metavar="ARCHIVE", help="replay stored initial conditions instead")
    t.add_argument("--replays", type=int, default=20)
    t.add_argument("--output", required=True)
    t.set_defaults(func=cmd_trapset)

    r = sub.add_parser("replay", help="re-decode stored trapset initial conditions with fresh noise")
    common(r)
    r.add_argument("--archive", required=True)
    r.add_argument("--replays", type=int, default=20)
    r.add_argument("--output", required=True)
    r.set_defaults(func=cmd_replay)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code not in (0, None) else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
