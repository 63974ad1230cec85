"""
Command Blueprints
Groups of subcommands registered on the single argparse entry point
"""

from dataclasses import dataclass, field


def arg(*flags, **kwargs) -> tuple:
    """argparse.add_argument parameters, stored until registration"""
    return flags, kwargs


@dataclass
class CommandSpec:
    name: str
    help: str
    handler: object
    arguments: tuple = ()


@dataclass
class CommandBlueprint:
    """
    A named family of subcommands

    Usage:
        evaluate_bp = CommandBlueprint('evaluate')

        @evaluate_bp.command('evaluate', 'Score a frame directory', arg('--gen', required=True))
        def cmd_evaluate(args, config):
            ...

    Handlers receive the parsed arguments and the loaded Config and return
    an exit code (None means 0).
    """

    name: str
    commands: list = field(default_factory=list)

    def command(self, name: str, help: str, *arguments):
        def decorator(f):
            self.commands.append(CommandSpec(name, help, f, arguments))
            return f

        return decorator

    def register(self, subparsers):
        for spec in self.commands:
            parser = subparsers.add_parser(spec.name, help=spec.help, description=spec.help)
            for flags, kwargs in spec.arguments:
                parser.add_argument(*flags, **kwargs)
            parser.set_defaults(handler=spec.handler, command=spec.name)
