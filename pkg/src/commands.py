#!/usr/bin/env python3
"""
Command module for vecfont.
Registry of subcommands: each has a handler, a parser configurator and a help
line, and the registry builds the argparse front end from them.
"""

import argparse
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

Handler = Callable[[argparse.Namespace], object]
Configurator = Callable[[argparse.ArgumentParser], None]


@dataclass
class CommandSpec:
    name: str
    handler: Handler
    configure: Optional[Configurator] = None
    help: str = ""


class CommandProcessor:
    """Process subcommands for vecfont."""

    def __init__(self, logger):
        self.logger = logger
        self.commands: Dict[str, CommandSpec] = {}
        self.aliases: Dict[str, str] = {}

    def register_command(self, name: str, func: Handler, configure: Optional[Configurator] = None,
                         help: str = "", alias: Optional[List[str]] = None):
        self.commands[name] = CommandSpec(name, func, configure, help)
        if alias:
            for a in alias:
                self.aliases[a] = name

    def resolve(self, command: str) -> str:
        return self.aliases.get(command, command)

    def build_parser(self, prog: str, global_options: Optional[Configurator] = None) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(prog=prog, description="Vector font style transfer toolkit")
        if global_options:
            global_options(parser)
        sub = parser.add_subparsers(dest="command", metavar="COMMAND")
        sub.required = True
        for spec in self.commands.values():
            aliases = [a for a, target in self.aliases.items() if target == spec.name]
            p = sub.add_parser(spec.name, help=spec.help, description=spec.help, aliases=aliases)
            if spec.configure:
                spec.configure(p)
        return parser

    def execute_command(self, command: str, args: argparse.Namespace):
        command = self.resolve(command)
        if command not in self.commands:
            self.logger.error(f"Unknown command: {command}")
            raise ValueError(f"Unknown command: {command}")
        try:
            return self.commands[command].handler(args)
        except Exception as e:
            self.logger.debug(f"Error executing command {command}: {e}")
            raise
