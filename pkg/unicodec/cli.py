"""Command-line entry point: ``unicodec construct|simulate|bound|plot|reproduce``."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .bounds import bound_curve, bound_result, ebn0_at_fer
from .core.config import Config
from .core.exceptions import UnicodecException
from .core.log import configure_logging
from .core.types import SeedSpec
from .ldpc import ChainSpec, chain_from_spec, dvbs2_like, nr_like_bg2, write_alist, write_chain_spec
from .outer import CRC_PRESETS
from .polar import construct_aed_code, construct_polar_code, write_codespec
from .sim.config import ExperimentConfig
from .sim.export import export_csv, export_json, load_results
from .sim.plot import FigureStyle, render_figure
from .sim.registry import global_registry
from .sim.reproduce import FIGURES, reproduce
from .sim.runner import run_experiment

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    """Usage problems exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="unicodec", description="Polar and LDPC coding workbench")
    parser.add_argument("--log-level", default=None, help="logging level (default from UNICODEC_LOG_LEVEL)")
    parser.add_argument("--debug", action="store_true", help="debug logging")
    parser.add_argument("--env-file", default=None, help="dotenv file to load")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    # construct
    construct = sub.add_parser("construct", help="write code description files")
    kinds = construct.add_subparsers(dest="kind", required=True, parser_class=_Parser)

    p = kinds.add_parser("polar", help="DE/GA polar code (JSON code spec)")
    p.add_argument("--N", type=int, default=256)
    p.add_argument("--K", type=int, default=128, help="information bits including CRC")
    p.add_argument("--crc", choices=sorted(CRC_PRESETS), default=None)
    p.add_argument("--design-snr", type=float, default=None, help="design Eb/N0 in dB (searched if omitted)")
    p.add_argument("--out", required=True)

    p = kinds.add_parser("aed", help="automorphism-friendly polar code from a minimal info set")
    p.add_argument("--N", type=int, default=256)
    p.add_argument("--K", type=int, default=128)
    p.add_argument("--i-min", type=int, nargs="+", default=[31, 57])
    p.add_argument("--design-snr", type=float, default=None, help="design Eb/N0 in dB (searched if omitted)")
    p.add_argument("--out", required=True)

    p = kinds.add_parser("ldpc-5g", help="5G-style BG2 LDPC code (alist)")
    p.add_argument("--K", type=int, default=128)
    p.add_argument("--N", type=int, default=256)
    p.add_argument("--seed", type=int, default=None, help="build a seeded stand-in instead of the standard table")
    p.add_argument("--out", required=True)

    p = kinds.add_parser("dvbs2", help="DVB-S2-shaped normal-frame LDPC code (alist)")
    p.add_argument("--rate", choices=["1/2", "8/9"], default="1/2")
    p.add_argument("--seed", type=int, default=None, help="build a seeded stand-in instead of the standard table")
    p.add_argument("--out", required=True)

    p = kinds.add_parser("sc-ldpc", help="spatially-coupled chain (JSON chain spec)")
    p.add_argument("--w", type=int, default=3, help="coupling width")
    p.add_argument("--L", type=int, default=10, help="chain length")
    p.add_argument("--Z", type=int, default=800, help="lifting size")
    p.add_argument("--seed", type=int, default=SeedSpec().master_seed)
    p.add_argument("--out", required=True)

    # simulate
    p = sub.add_parser("simulate", help="run an experiment file")
    p.add_argument("--config", help="experiment JSON file")
    p.add_argument("--schema", action="store_true", help="print the experiment file schema and exit")
    p.add_argument("--list-schemes", action="store_true", help="list scheme families and exit")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--no-progress", action="store_true")

    # bound
    p = sub.add_parser("bound", help="normal-approximation FER bound")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--ebn0", type=float, nargs="+", default=[])
    p.add_argument("--fer", type=float, default=None, help="also print the Eb/N0 where the bound reaches FER")
    p.add_argument("--csv", default=None, help="write the curve as CSV")

    # plot
    p = sub.add_parser("plot", help="render CSV/JSON results as SVG")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--metric", choices=["fer", "ber"], default="fer")
    p.add_argument("--title", default=None)

    # reproduce
    p = sub.add_parser("reproduce", help="regenerate a comparison figure")
    p.add_argument("figure", choices=FIGURES)
    p.add_argument("--quick", action="store_true", help="reduced SNR grid and frame counts")
    p.add_argument("--out-dir", default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--no-progress", action="store_true")
    return parser


def _code_seed(args) -> Optional[SeedSpec]:
    return None if args.seed is None else SeedSpec(master_seed=args.seed)


def _construct(args, config: Config) -> int:
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == "polar":
        crc = CRC_PRESETS[args.crc] if args.crc else None
        spec = construct_polar_code(args.N, args.K, design_snr_db=args.design_snr, crc=crc,
                                    name=f"polar-{args.N}-{args.K}")
        write_codespec(spec, out)
    elif args.kind == "aed":
        spec = construct_aed_code(args.N, args.K, args.i_min, design_snr_db=args.design_snr, name=f"polar-aed-{args.N}-{args.K}")
        write_codespec(spec, out)
    elif args.kind == "ldpc-5g":
        write_alist(nr_like_bg2(args.K, args.N, seed=_code_seed(args)).H, out)
    elif args.kind == "dvbs2":
        write_alist(dvbs2_like(args.rate, seed=_code_seed(args)).H, out)
    else:
        spec = ChainSpec(coupling_width=args.w, chain_length=args.L, lifting_size=args.Z,
                         seed=SeedSpec(master_seed=args.seed))
        chain = chain_from_spec(spec)
        write_chain_spec(chain, out)
        print(f"chain: N={chain.N}, checks={chain.H.M}, design rate={chain.design_rate:.4f}")
    print(f"✅ wrote {out}")
    return EXIT_OK


def _print_points(result) -> None:
    print(f"{result.scheme}: N={result.code_length}, payload={result.payload_bits}, R={result.rate:.4f}")
    print("  ebn0_db    frames  errors        FER        BER  stop")
    for p in result.points:
        print(f"  {p.ebn0_db:7.3f} {p.frames:9d} {p.frame_errors:7d} {p.fer:10.3e} {p.ber or 0.0:10.3e}  "
              f"{p.termination}")


def _simulate(args, config: Config) -> int:
    if args.schema:
        print(ExperimentConfig.schema_text())
        return EXIT_OK
    if args.list_schemes:
        print(global_registry.get_schemes_description())
        return EXIT_OK
    if not args.config:
        raise UnicodecException("simulate needs --config (or --schema / --list-schemes)")
    cfg = ExperimentConfig.from_file(args.config)
    if args.workers is not None:
        cfg = ExperimentConfig.model_validate({**cfg.model_dump(), "workers": args.workers})
    result = run_experiment(cfg, config=config, progress=not args.no_progress and config.progress)
    out_dir = Path(args.out_dir or config.output_dir)
    csv_path = export_csv(result, out_dir / f"{cfg.name}.csv")
    json_path = export_json(result, out_dir / f"{cfg.name}.json")
    _print_points(result)
    print(f"✅ wrote {csv_path} and {json_path}")
    return EXIT_OK


def _bound(args, config: Config) -> int:
    for point in bound_curve(args.n, args.k, args.ebn0):
        print(f"{point.ebn0_db:.3f} {point.fer_bound:.4e}")
    if args.fer is not None:
        print(f"FER {args.fer:.1e} reached at {ebn0_at_fer(args.n, args.k, args.fer):.3f} dB")
    if args.csv:
        if not args.ebn0:
            print("⚠️ no --ebn0 points given, CSV not written", file=sys.stderr)
        else:
            print(f"✅ wrote {export_csv(bound_result(args.n, args.k, args.ebn0), args.csv)}")
    return EXIT_OK


def _plot(args, config: Config) -> int:
    results = [r for path in args.inputs for r in load_results(path)]
    style = FigureStyle(metric=args.metric, title=args.title)
    print(f"✅ wrote {render_figure(results, args.out, style=style)}")
    return EXIT_OK


def _reproduce(args, config: Config) -> int:
    if args.workers is not None:
        config = config.model_copy(update={"workers": args.workers})
    out_dir = Path(args.out_dir or config.output_dir)
    outputs = reproduce(args.figure, out_dir, quick=args.quick, config=config,
                        progress=not args.no_progress and config.progress)
    for result in outputs.results:
        _print_points(result)
    figures = f"{outputs.svg} and {outputs.ber_svg}" if outputs.ber_svg else str(outputs.svg)
    print(f"✅ wrote {outputs.csv}, {outputs.json}, {figures}")
    return EXIT_OK


COMMANDS = {
    "construct": _construct,
    "simulate": _simulate,
    "bound": _bound,
    "plot": _plot,
    "reproduce": _reproduce,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    config = Config.from_env(dotenv_path=args.env_file, log_level=args.log_level, debug=args.debug or None)
    configure_logging(config)
    try:
        return COMMANDS[args.command](args, config)
    except (UnicodecException, OSError) as exc:
        logger.debug("command failed", exc_info=True)
        print(f"❌ {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
