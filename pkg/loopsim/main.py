import argparse
import logging
import sys
import time
from pathlib import Path
from typing import List, Optional

from . import __version__
from .cli.presets import PRESETS, RunContext, split_overrides
from .cli.validate import report, validate
from .config.loader import config_hash, load_config
from .config.models import SimulationMode
from .errors import ConfigError, LoopsimError
from .settings import load_settings
from .store.records import CONFIG_NAME, RunManifest, RunStore

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SIMULATION = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="loopsim", description="Superconducting optoelectronic loop-neuron simulator")
    parser.add_argument("--preset", required=True, choices=sorted(PRESETS),
                        help="; ".join(f"{p.name}: {p.description}" for p in PRESETS.values()))
    parser.add_argument("--config", type=Path, help="JSON configuration layered over the shipped defaults")
    parser.add_argument("--seed", type=int, help="Master seed")
    parser.add_argument("--out-dir", type=Path, help="Output directory")
    parser.add_argument("--t-end", type=float, help="Simulated duration (s)")
    parser.add_argument("--mode", choices=[m.value for m in SimulationMode], help="Overrides the configured mode")
    parser.add_argument("--override", action="append", default=[], metavar="KEY=VALUE",
                        help="Configuration override (dotted path); preset.<option>=value sets preset options")
    parser.add_argument("--log-level", help="DEBUG, INFO, WARNING or ERROR")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return parser


def _flag_overrides(args: argparse.Namespace) -> List[str]:
    """Dedicated flags, applied after the file and --override"""
    flags = []
    if args.seed is not None:
        flags.append(f"seed={args.seed}")
    if args.t_end is not None:
        flags.append(f"t_end={args.t_end!r}")
    if args.mode is not None:
        flags.append(f"mode={args.mode}")
    return flags


def _print_violations(error: ConfigError):
    print(f"configuration error: {error}", file=sys.stderr)
    for v in error.violations:
        print(f"  {v}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = load_settings()
    logging.basicConfig(
        level=getattr(logging, (args.log_level or settings.log_level).upper(), logging.INFO),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    preset = PRESETS[args.preset]
    out_dir = args.out_dir or settings.out_dir / preset.name
    started = time.perf_counter()
    config_overrides, options = split_overrides(args.override)
    defaults_file = settings.defaults_file

    try:
        if preset.entry is None:
            violations = validate(args.config, config_overrides, defaults_file)
            RunStore(out_dir).json("validation.json", report(violations, args.config))
            for v in violations:
                print(f"  {v}", file=sys.stderr)
            return EXIT_CONFIG if violations else EXIT_OK

        if settings.seed is not None:
            config_overrides = [f"seed={settings.seed}"] + config_overrides
        config = load_config(args.config, config_overrides + _flag_overrides(args), defaults_file)
        seed = config.seed
        violations = config.violations()
        if violations:
            raise ConfigError("configuration violates parameter invariants", violations=violations,
                              source=str(args.config or defaults_file))

        preset_options = preset.options(options)
        store = RunStore(out_dir)
        store.json(CONFIG_NAME, config.model_dump(mode="json"))
        ctx = RunContext(config=config, store=store, seed=seed, mode=config.mode, t_end=config.t_end,
                         parallelism=settings.parallelism or config.parallelism, options=preset_options)
        logger.info("Running preset %s (seed %d, config %s)", preset.name, seed, config_hash(config)[:12])
        summary = preset.entry(ctx)
        store.json("summary.json", {"preset": preset.name, "seed": seed, "results": summary})
        store.manifest(RunManifest(preset=preset.name, config_hash=config_hash(config), seed=seed,
                                   version=__version__, t_end=config.t_end, mode=config.mode.value,
                                   wall_time=time.perf_counter() - started,
                                   overrides=list(args.override)))
    except ConfigError as e:
        _print_violations(e)
        return EXIT_CONFIG
    except LoopsimError as e:
        logger.error("Simulation failed: %s", e)
        return EXIT_SIMULATION

    logger.info("Preset %s finished in %.1f s; outputs in %s", preset.name, time.perf_counter() - started, out_dir)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
