"""Command line driver: simulate, extract, reconstruct, pipeline, converge.

Every verb reads an optional INI config plus repeatable section.key=value
overrides, so flags mirror config keys one to one.  Exit codes identify the
failing stage: 2 config/usage, 3 simulate, 4 extract, 5 norming, 6 kernel,
7 reconstruct, 8 source, 9 file format, 1 anything else.
"""

import argparse
import os
import sys

import numpy as np

from . import io as qio
from .errors import InvalidInputError, ReconError, TraceFormatError
from .extract import extract_spectrum
from .norming import build_spectral_data
from .pipeline import (StageFailure, _extract_options, config_hash,
                       convergence_experiment, load_config, run_pipeline,
                       simulate_traces)
from .reconstruct import reconstruct_potential

STAGE_CODES = {
    "simulate": 3,
    "extract": 4,
    "norming": 5,
    "kernel": 6,
    "reconstruct": 7,
    "source": 8,
}


def _add_common(sub):
    sub.add_argument("--config", help="INI config file")
    sub.add_argument("--set", dest="overrides", action="append", default=[],
                     metavar="SECTION.KEY=VALUE", help="override one config key")
    sub.add_argument("--outdir", default="qrecon_out", help="output directory")


def _cmd_simulate(cfg, outdir):
    os.makedirs(outdir, exist_ok=True)
    sim = simulate_traces(cfg)
    path = os.path.join(outdir, "traces.csv")
    qio.write_traces(path, sim["r0"], sim["r1"])
    qio.write_manifest(os.path.join(outdir, "manifest.json"), {
        "config_hash": config_hash(cfg),
        "seed": cfg["simulate"].getint("seed"),
        "modes": len(sim["sys"]),
        "lambdas": sim["sys"].lambdas.tolist(),
        "artifacts": [{"name": "traces.csv", "sha256": qio.sha256_file(path)}],
    })
    print(f"wrote {path} ({sim['r0'].M + 1} samples, {len(sim['sys'])} modes)")


def _cmd_extract(cfg, outdir, traces):
    os.makedirs(outdir, exist_ok=True)
    r0, r1 = qio.read_traces(traces)
    data = extract_spectrum(r0, r1, _extract_options(cfg))
    path = os.path.join(outdir, "extracted.json")
    qio.write_extracted(path, data)
    print(f"wrote {path} ({len(data)} modes, worst residual "
          f"{float(np.max(data.residuals)):.2e})")


def _cmd_reconstruct(cfg, outdir, extracted_path):
    os.makedirs(outdir, exist_ok=True)
    loaded = qio.read_extracted(extracted_path)
    sd = build_spectral_data(loaded, delta=cfg["norming"].getfloat("delta"),
                             n_modes=cfg["kernel"].getint("n_modes"))
    qio.write_spectral(os.path.join(outdir, "spectral.json"), sd)
    rsec = cfg["reconstruct"]
    results = reconstruct_potential(
        sd, method=rsec["method"], kernel_m=cfg["kernel"].getint("m"),
        window=rsec.getint("window"), ring_filter=rsec.getboolean("ring_filter"),
        bcm_tau_count=rsec.getint("bcm_tau_count"),
        bcm_kernel_m=rsec.getint("bcm_kernel_m"),
        bcm_extrapolate=rsec.getboolean("bcm_extrapolate"))
    for out in results:
        tag = out.method.lower()
        path = os.path.join(outdir, f"potential_{tag}.csv")
        qio.write_potential(path, out.qhat, os.path.join(outdir, f"potential_{tag}.json"),
                            dict(out.diagnostics, condition=out.condition))
        print(f"wrote {path}")


def _cmd_pipeline(cfg, outdir):
    manifest = run_pipeline(cfg, outdir)
    print(f"pipeline complete: {len(manifest['artifacts'])} artifacts in {outdir}")
    for key, val in sorted(manifest.get("metrics", {}).items()):
        if isinstance(val, float):
            print(f"  {key} = {val:.6g}")


def _cmd_converge(cfg, outdir):
    rows = convergence_experiment(cfg, outdir)
    print(f"wrote {os.path.join(outdir, 'convergence.csv')} ({len(rows)} rows)")
    for row in rows:
        if row.get("feasible"):
            print(f"  delta={row['delta']} n={row['n']} eps={row['epsilon']:.3e} "
                  f"N={row['N']} h1_proxy={row.get('h1_proxy', float('nan')):.4f}")
        else:
            print(f"  delta={row['delta']} n={row['n']} infeasible: {row.get('note', '')}")


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="qrecon",
        description="Recover a 1D Schrodinger potential from boundary derivative traces")
    subs = parser.add_subparsers(dest="verb", required=True)
    for verb in ("simulate", "extract", "reconstruct", "pipeline", "converge"):
        sub = subs.add_parser(verb)
        _add_common(sub)
        if verb == "extract":
            sub.add_argument("--traces", required=True, help="trace CSV from simulate")
        if verb == "reconstruct":
            sub.add_argument("--extracted", required=True, help="extracted JSON")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config, args.overrides)
    except (InvalidInputError, TraceFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.verb == "simulate":
            _cmd_simulate(cfg, args.outdir)
        elif args.verb == "extract":
            _cmd_extract(cfg, args.outdir, args.traces)
        elif args.verb == "reconstruct":
            _cmd_reconstruct(cfg, args.outdir, args.extracted)
        elif args.verb == "pipeline":
            _cmd_pipeline(cfg, args.outdir)
        elif args.verb == "converge":
            _cmd_converge(cfg, args.outdir)
    except StageFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return STAGE_CODES.get(exc.stage, 1)
    except TraceFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 9
    except ReconError as exc:
        # verbs map one-to-one onto stages when run standalone
        verb_stage = {"simulate": "simulate", "extract": "extract",
                      "reconstruct": "reconstruct"}.get(args.verb)
        print(f"error: {exc}", file=sys.stderr)
        return STAGE_CODES.get(verb_stage, 1)
    return 0


if __name__ == "__main__":
    sys.exit(main())
