"""Command registration for the command-line front end"""
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from app.models.jobs import JobConfig
from app.models.responses import JobReport


@dataclass(frozen=True)
class Argument:
    """One argparse flag owned by a command"""
    flags: Tuple[str, ...]
    options: Dict[str, Any] = field(default_factory=dict)


def arg(*flags: str, **options: Any) -> Argument:
    return Argument(flags=flags, options=options)


@dataclass
class JobOutcome:
    """Report plus optional artifacts of one job"""
    report: JobReport
    dump: Optional[str] = None
    grid: Optional[np.ndarray] = None
    grid_header: List[str] = field(default_factory=list)


Handler = Callable[[JobConfig], JobOutcome]


@dataclass(frozen=True)
class CommandSpec:
    name: str
    summary: str
    handler: Handler
    arguments: Tuple[Argument, ...] = ()


class CommandRouter:
    """Groups the commands of one job domain"""

    def __init__(self, tags: List[str]):
        self.tags = tags
        self.commands: Dict[str, CommandSpec] = {}

    def command(self, name: str, summary: str, *arguments: Argument) -> Callable[[Handler], Handler]:
        """
        Register a handler under `name`.

        Args:
            name: Command name as typed on the command line
            summary: One-line help text, also used in log messages
            *arguments: Flags specific to this command
        """
        def decorator(func: Handler) -> Handler:
            self.commands[name] = CommandSpec(name=name, summary=summary, handler=func, arguments=arguments)
            return func
        return decorator
