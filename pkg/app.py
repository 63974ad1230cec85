"""
Audio-Driven Talking Head Pipeline - Command Line Interface
synth-data, train a2l|ae|l2v, generate, evaluate, ablation
"""

import argparse
import logging
import os
import sys
from pathlib import Path

from commands import BLUEPRINTS
from config import PRESET_NAMES, Config
from utils.errors import ConfigError, DataError, DependencyError, TalkingHeadError

logger = logging.getLogger(__name__)

ERROR_HANDLERS = {}


def errorhandler(error_type):
    """Register a handler turning an escaped exception into an exit code"""
    def decorator(f):
        ERROR_HANDLERS[error_type] = f
        return f

    return decorator


@errorhandler(ConfigError)
def config_error(error):
    """Handle configuration errors"""
    print(f"❌ {error.label}: {error}", file=sys.stderr)
    print("Check the config file, TALKHEAD_* environment variables and --preset.", file=sys.stderr)
    return error.exit_code


@errorhandler(DependencyError)
def dependency_error(error):
    """Handle missing prerequisite artifacts"""
    print(f"❌ {error.label}: {error}", file=sys.stderr)
    for missing in error.missing:
        print(f"   - {missing}", file=sys.stderr)
    return error.exit_code


@errorhandler(DataError)
def data_error(error):
    """Handle unusable inputs and unwritable outputs"""
    print(f"❌ {error.label}: {error}", file=sys.stderr)
    return error.exit_code


@errorhandler(TalkingHeadError)
def pipeline_error(error):
    """Handle the remaining pipeline errors (contract, range, geometry, model divergence)"""
    print(f"❌ {error.label}: {error}", file=sys.stderr)
    return error.exit_code


def handle_error(error: Exception) -> int:
    for error_type in type(error).__mro__:
        if error_type in ERROR_HANDLERS:
            return ERROR_HANDLERS[error_type](error)
    logger.exception("Unexpected failure")
    print(f"❌ Internal error: {error}", file=sys.stderr)
    return 1


def log_level(name: str) -> int:
    level = logging.getLevelName(str(name).upper())
    return level if isinstance(level, int) else logging.INFO


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='talkhead', description=__doc__.strip().splitlines()[0])
    parser.add_argument('--config', type=Path, default=None, help='Config file of KEY=value lines')
    parser.add_argument('--seed', type=int, default=None, help='Master seed')
    parser.add_argument('--preset', choices=PRESET_NAMES, default=None, help='Scale preset')
    parser.add_argument('--data-dir', type=Path, default=None, help='Synthetic corpus directory')
    parser.add_argument('--run-dir', type=Path, default=None, help='Checkpoints, logs and reports')

    subparsers = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')
    # Register blueprints
    for blueprint in BLUEPRINTS:
        blueprint.register(subparsers)
    return parser


def main(argv=None) -> int:
    """
    Parse arguments, load the configuration and dispatch one command

    Returns:
        int: 0 success, 2 config error, 3 missing dependency, 4 data error, 1 anything else
    """
    logging.basicConfig(
        level=log_level(os.environ.get('TALKHEAD_LOG_LEVEL', os.environ.get('LOG_LEVEL', 'INFO'))),
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
    )
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = Config.load(args.config, preset=args.preset, seed=args.seed,
                             data_dir=args.data_dir, run_dir=args.run_dir)
        logging.getLogger().setLevel(log_level(config.log_level))
        logger.debug(f"Config: {config.get_info()}")
        return args.handler(args, config) or 0
    except Exception as e:
        return handle_error(e)


if __name__ == '__main__':
    sys.exit(main())
