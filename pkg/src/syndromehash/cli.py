"""Command-line front end.

Exit codes: 0 success or access granted, 1 access denied, 2 error.

Every run starts its output with a reproducibility header (tool version, a
digest of the effective configuration, the master seed). CSV and text outputs
carry it as ``# key: value`` lines. Formats with a fixed first line (alist,
template files) and enrollment records get it in a ``<file>.meta`` sidecar.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .alist import AlistError, alist_read, alist_write, code_id
from .bits import BitVector
from .channel import DEFAULT_MIN_FRAME_ERRORS, run_montecarlo
from .decoders import DecoderConfig, Variant
from .density import DeConfig, threshold
from .ensemble import EnsembleSpec, InfeasibleEnsemble, edge_distributions, feasibility, format_polynomial, row_weight_profile
from .entropy import (
    INTER_MODELS,
    dof_report,
    histogram_csv,
    pairwise_distances,
    pseudomask_from_masks,
    read_template_set,
    syndrome_set,
    synth_generate,
    write_template_set,
)
from .matrix import LdpcCode, is_lower_triangular
from .peg import PegConfig, girth_histogram, peg_construct
from .schemes import COMMITMENT, SYNDROME_HASH, EnrollmentRecord, enroll, verify

EXIT_OK, EXIT_DENIED, EXIT_ERROR = 0, 1, 2
TABLE_RATES = tuple(round(0.01 * i, 2) for i in range(1, 11))
VERIFY_CHANNEL_P = 0.15
SCHEMES = {"fh": SYNDROME_HASH, "fc": COMMITMENT}

# keys that never change results and so stay out of the config digest
_NOT_DIGESTED = {"out", "config", "workers", "command", "func"}


class CliError(Exception):
    pass


# reproducibility ------------------------------------------------------------

def run_header(args: argparse.Namespace) -> dict:
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_DIGESTED}
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    return {
        "tool": f"syndromehash {__version__}",
        "command": args.command,
        "config_digest": hashlib.sha256(blob).hexdigest()[:16],
        "master_seed": args.seed,
    }


def _comment_block(header: dict) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in header.items())


def _meta_text(header: dict, extra: dict) -> str:
    return "".join(f"{k}: {v}\n" for k, v in {**header, **extra}.items())


def _emit(args, text: str) -> None:
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(args.out).write_text(text)


def _need_out(args, what: str) -> Path:
    if args.out in (None, "-"):
        raise CliError(f"{what} needs --out <path>")
    return Path(args.out)


# loaders ------------------------------------------------------------------------

def _load_code(path) -> LdpcCode:
    p = Path(path)
    try:
        h = alist_read(p.read_text())
    except FileNotFoundError:
        raise CliError(f"code file not found: {p}") from None
    except AlistError as exc:
        raise CliError(f"malformed alist file {p}: {exc}") from None
    return LdpcCode(h, triangular=is_lower_triangular(h))


def _load_templates(path):
    try:
        return read_template_set(path)
    except FileNotFoundError as exc:
        raise CliError(f"template file not found: {exc.filename}") from None
    except ValueError as exc:
        raise CliError(f"malformed template file: {exc}") from None


def _pick_template(path, index: int) -> BitVector:
    ts = _load_templates(path)
    if not 0 <= index < ts.count:
        raise CliError(f"template index {index} out of range for {path} ({ts.count} templates)")
    return BitVector.from_bits(ts.bits[index])


def _decoder_config(args, default_p=None) -> DecoderConfig:
    variant = Variant(args.decoder)
    channel_p = args.channel_p
    if channel_p is None and variant is Variant.SPA:
        channel_p = default_p
    return DecoderConfig(args.max_iter, variant, tuple(args.b_schedule) if args.b_schedule else None, channel_p)


# subcommands ------------------------------------------------------------------

def cmd_ensemble(args) -> int:
    if args.n is not None or args.k is not None:
        if args.n is None or args.k is None:
            raise CliError("give both --n and --k, or --rate")
        spec = EnsembleSpec.from_code_size(args.n, args.k, args.dv)
    elif args.rate is not None:
        spec = EnsembleSpec(Fraction(str(args.rate)), args.dv)
    else:
        raise CliError("give --rate or --n and --k")
    lines = [f"rate: {float(spec.rate):.6g}", f"dv: {spec.dv}"]
    if not feasibility(spec):
        sys.stderr.write(f"infeasible: rate {float(spec.rate):.6g} needs to be below 1/(dv+1) = {1 / (spec.dv + 1):.6g}\n")
        return EXIT_ERROR
    lines.append("feasible: yes")
    if args.n is not None:
        light, heavy = row_weight_profile(args.n, args.k, args.dv)
        lines.append(f"rows: {light} of weight {args.dv}, {heavy} of weight {args.dv + 1}")
    dist = edge_distributions(spec)
    lines.append(f"lambda(x) = {format_polynomial(dist.lambda_coeffs)}")
    lines.append(f"rho(x) = {format_polynomial(dist.rho_coeffs)}")
    _emit(args, _comment_block(run_header(args)) + "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_threshold(args) -> int:
    cfg = DeConfig.asymptotic() if args.asymptotic else DeConfig()
    cfg = DeConfig(
        args.max_iter if args.max_iter is not None else cfg.max_iter,
        args.tol if args.tol is not None else cfg.tol,
        args.precision,
    )
    digits = max(4, int(np.ceil(-np.log10(args.precision))) + 1)
    rows = ["rate," + ",".join(f"dv{dv}" for dv in args.dvs)]
    for rate in args.rates:
        cells = []
        for dv in args.dvs:
            spec = EnsembleSpec(Fraction(str(rate)), dv)
            cells.append(f"{threshold(edge_distributions(spec), cfg):.{digits}f}" if feasibility(spec) else "")
        rows.append(f"{rate:g}," + ",".join(cells))
    header = {**run_header(args), "de_max_iter": cfg.max_iter, "de_tol": cfg.tol}
    _emit(args, _comment_block(header) + "\n".join(rows) + "\n")
    return EXIT_OK


def cmd_construct(args) -> int:
    out = _need_out(args, "construct")
    try:
        code = peg_construct(PegConfig(args.n, args.n - args.k, args.dv, args.triangular, args.seed))
    except InfeasibleEnsemble as exc:
        raise CliError(f"infeasible: {exc}") from None
    report = girth_histogram(code.h)
    out.write_text(alist_write(code.h))
    meta = {
        "code_id": code_id(code.h),
        "n": code.n,
        "k": code.k,
        "dv": args.dv,
        "seed": args.seed,
        "triangular": str(args.triangular).lower(),
        "girth": report.girth,
    }
    Path(str(out) + ".meta").write_text(_meta_text(run_header(args), meta))
    print(f"{out}: {meta['code_id']} girth {report.girth}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    code = _load_code(args.code)
    cfg = _decoder_config(args)
    mfe = args.min_frame_errors if args.early_stop else None
    report = run_montecarlo(code, cfg, args.p, args.frames, args.seed, mfe, args.workers, args.random_codewords)
    _emit(args, report.to_csv(run_header(args)))
    return EXIT_OK


def cmd_enroll(args) -> int:
    out = _need_out(args, "enroll")
    code = _load_code(args.code)
    x = _pick_template(args.template, args.index)
    record = enroll(code, x, SCHEMES[args.scheme], args.seed)
    out.write_text(record.to_json())
    Path(str(out) + ".meta").write_text(_meta_text(run_header(args), {"code": args.code, "template": args.template}))
    print(f"{out}: {record.scheme} record for {record.code_ref.id}")
    return EXIT_OK


def cmd_verify(args) -> int:
    code = _load_code(args.code)
    try:
        record = EnrollmentRecord.from_json(Path(args.record).read_text())
    except FileNotFoundError:
        raise CliError(f"record file not found: {args.record}") from None
    y = _pick_template(args.probe, args.index)
    outcome = verify(code, record, y, _decoder_config(args, VERIFY_CHANNEL_P))
    verdict = "granted" if outcome.granted else "denied"
    _emit(args, _comment_block(run_header(args)) + f"{verdict} iterations={outcome.decoder_iterations}\n")
    return EXIT_OK if outcome.granted else EXIT_DENIED


def cmd_analyze(args) -> int:
    out = _need_out(args, "analyze")
    ts = _load_templates(args.templates)
    mask = None
    if args.pseudomask:
        if ts.masks is None:
            raise CliError("--pseudomask needs a .mask file next to the templates")
        mask = pseudomask_from_masks(ts, args.m_th, literal=args.literal_mask)

    series = {}
    try:
        series["templates_inter"] = pairwise_distances(ts, "inter", mask)
    except ValueError as exc:
        raise CliError(str(exc)) from None
    try:
        series["templates_intra"] = pairwise_distances(ts, "intra", mask)
    except ValueError:
        pass  # one reading per subject
    if args.code:
        code = _load_code(args.code)
        if ts.length != code.n:
            raise CliError(f"template length {ts.length} != code length {code.n}")
        series["syndromes_inter"] = pairwise_distances(syndrome_set(ts, code), "inter")

    header = _comment_block({**run_header(args), "kept_positions": ts.length if mask is None else len(mask.kept)})
    rows = ["series,pairs,mu,sigma,dof"]
    for name, d in series.items():
        rep = dof_report(d)
        rows.append(f"{name},{rep.pair_count},{rep.mu!r},{rep.sigma!r},{rep.dof!r}")
    Path(str(out) + "_dof.csv").write_text(header + "\n".join(rows) + "\n")
    for name, d in series.items():
        Path(f"{out}_{name}_hist.csv").write_text(header + histogram_csv(d))
    print(f"{out}_dof.csv: " + ", ".join(f"{k} dof={dof_report(v).dof:.1f}" for k, v in series.items()))
    return EXIT_OK


def cmd_synth(args) -> int:
    out = _need_out(args, "synth")
    ts = synth_generate(
        args.subjects, args.readings, args.length, args.intra_p, args.inter_model,
        args.mask_p, args.seed, args.block,
    )
    write_template_set(ts, out)
    Path(str(out) + ".meta").write_text(_meta_text(run_header(args), {"templates": ts.count, "length": ts.length}))
    print(f"{out}: {ts.count} templates of length {ts.length}")
    return EXIT_OK


# parser ---------------------------------------------------------------------------

def _add_decoder_flags(p):
    p.add_argument("--decoder", choices=[v.value for v in Variant], default=Variant.SPA.value)
    p.add_argument("--max-iter", type=int, default=100)
    p.add_argument("--channel-p", type=float, default=None, help="SPA design crossover probability")
    p.add_argument("--b-schedule", type=int, nargs="+", default=None, help="Gallager B thresholds per iteration")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="master seed for all randomness")
    common.add_argument("--out", default=None, help="output path ('-' or absent: stdout where allowed)")
    common.add_argument("--config", default=None, help="key=value file; flags override its values")

    parser = argparse.ArgumentParser(prog="syndromehash", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"syndromehash {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ensemble", parents=[common], help="feasibility, row profile and lambda/rho")
    p.add_argument("--rate", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--dv", type=int, required=True)
    p.set_defaults(func=cmd_ensemble)

    p = sub.add_parser("threshold", parents=[common], help="Gallager-A thresholds as CSV")
    p.add_argument("--rates", type=float, nargs="+", default=list(TABLE_RATES))
    p.add_argument("--dvs", type=int, nargs="+", default=[3, 4, 5])
    p.add_argument("--precision", type=float, default=1e-4)
    p.add_argument("--max-iter", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--asymptotic", action="store_true", help="long-run DE limit instead of the 100-iteration budget")
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("construct", parents=[common], help="PEG code to alist plus .meta sidecar")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--dv", type=int, required=True)
    p.add_argument("--triangular", action="store_true")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo BER/FER over the BSC")
    p.add_argument("--code", required=True)
    p.add_argument("--p", type=float, nargs="+", required=True)
    p.add_argument("--frames", type=int, default=100)
    p.add_argument("--early-stop", action="store_true")
    p.add_argument("--min-frame-errors", type=int, default=DEFAULT_MIN_FRAME_ERRORS)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--random-codewords", action="store_true")
    _add_decoder_flags(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("enroll", parents=[common], help="write an enrollment record")
    p.add_argument("--code", required=True)
    p.add_argument("--template", required=True, help="FTPL1 template file")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--scheme", choices=sorted(SCHEMES), default="fh")
    p.set_defaults(func=cmd_enroll)

    p = sub.add_parser("verify", parents=[common], help="verify a probe; exit 0 granted, 1 denied")
    p.add_argument("--code", required=True)
    p.add_argument("--record", required=True)
    p.add_argument("--probe", required=True, help="FTPL1 template file")
    p.add_argument("--index", type=int, default=0)
    _add_decoder_flags(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", parents=[common], help="DOF and distance histograms")
    p.add_argument("--templates", required=True)
    p.add_argument("--code", default=None, help="also analyze syndromes through this code")
    p.add_argument("--pseudomask", action="store_true")
    p.add_argument("--m-th", type=float, default=0.024)
    p.add_argument("--literal-mask", action="store_true", help="read m(i) as non-erase frequency")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("synth", parents=[common], help="synthetic template set")
    p.add_argument("--subjects", type=int, default=50)
    p.add_argument("--readings", type=int, default=1)
    p.add_argument("--length", type=int, default=9600)
    p.add_argument("--intra-p", type=float, default=0.28)
    p.add_argument("--inter-model", choices=INTER_MODELS, default="uniform")
    p.add_argument("--block", type=int, default=32)
    p.add_argument("--mask-p", type=float, default=None, help="per-position erase probability")
    p.set_defaults(func=cmd_synth)
    return parser


def _config_argv(sub: argparse.ArgumentParser, path: str) -> list[str]:
    """Translate a key=value file into flags placed before the command line ones."""
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise CliError(f"config file not found: {path}") from None
    actions = {a.dest: a for a in sub._actions if a.option_strings}
    argv = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise CliError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        dest = key.replace("-", "_")
        if dest in ("config", "help") or dest not in actions:
            raise CliError(f"{path}:{lineno}: unknown key {key!r}")
        action = actions[dest]
        flag = action.option_strings[-1]
        if action.nargs == 0:
            if value.lower() in ("1", "true", "yes", "on"):
                argv.append(flag)
            elif value.lower() not in ("0", "false", "no", "off"):
                raise CliError(f"{path}:{lineno}: {key} expects true or false")
        elif action.nargs in ("+", "*"):
            argv += [flag, *value.replace(",", " ").split()]
        else:
            argv += [flag, value]
    return argv


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    commands = parser._subparsers._group_actions[0].choices
    try:
        pre = argparse.ArgumentParser(add_help=False)
        pre.add_argument("--config")
        known, _ = pre.parse_known_args(argv)
        cmd_pos = next((i for i, tok in enumerate(argv) if tok in commands), None)
        if known.config and cmd_pos is not None:
            # file values go first so that explicit flags win
            extra = _config_argv(commands[argv[cmd_pos]], known.config)
            argv = argv[:cmd_pos + 1] + extra + argv[cmd_pos + 1:]
        args = parser.parse_args(argv)
        return args.func(args)
    except (CliError, ValueError, OSError) as exc:  # SchemeError and InfeasibleEnsemble are ValueErrors
        sys.stderr.write(f"error: {exc}\n")
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
