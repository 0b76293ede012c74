"""
main.py
-------
Command-line entry point for AutoSample.

Run locally:
    python main.py gen --out-dir runs/data --seed 7
    python main.py auto --data runs/data/synthetic.tsv --samplers "rns;pns;dns:c=10" --epochs 30
    python main.py grid --data runs/data/synthetic.tsv --samplers "rns;pns;dns" --jobs 3

Every RunConfig key is also a flag (`lr_w` ↔ `--lr-w`); flags win over
`--config` file values.  Exit codes: 0 success, 2 usage/config, 3 runtime.
"""
from dotenv import load_dotenv
load_dotenv()

import argparse
import sys
from typing import List, Optional

from config.errors import ConfigError
from config.logger import get_logger, set_level
from config.run_config import RunConfig, load_config
from config.settings import VERSION
from pipeline.commands import COMMANDS, ExperimentPipeline

log = get_logger(__name__)

EXIT_OK      = 0
EXIT_USAGE   = 2
EXIT_RUNTIME = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="autosample", description="AutoSample: negative sampler search")
    parser.add_argument("--version", action="version", version=f"%(prog)s {VERSION}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    for name, help_text in COMMANDS.items():
        cmd = sub.add_parser(name, help=help_text, description=help_text)
        cmd.add_argument("--config",    default=None, help="flat key=value config file")
        cmd.add_argument("--log-level", default=None, help="DEBUG | INFO | WARNING | ERROR")
        for key, field in RunConfig.model_fields.items():
            flag = "--" + key.replace("_", "-")
            if field.annotation is bool:
                cmd.add_argument(flag, dest=key, nargs="?", const="true", default=None,
                                 help=f"(default: {field.default})")
            else:
                cmd.add_argument(flag, dest=key, default=None, help=f"(default: {field.default})")
    return parser


def cmd_dispatch(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK

    if args.log_level:
        set_level(args.log_level)

    overrides = {k: getattr(args, k) for k in RunConfig.model_fields}
    try:
        cfg = load_config(args.config, overrides)
        summary = ExperimentPipeline(cfg, args.command).run()
    except ConfigError as exc:
        log.error("Configuration error: %s", exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        log.error("%s failed: %s", args.command, exc)
        log.debug("Traceback:", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME

    print(summary)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(cmd_dispatch())
