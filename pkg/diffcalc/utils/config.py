# The MIT License (MIT)
# Copyright © 2025 The diffcalc developers

# Permission is hereby granted, free of charge, to any person obtaining a copy of this software and associated
# documentation files (the “Software”), to deal in the Software without restriction, including without limitation
# the rights to use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of the Software,
# and to permit persons to whom the Software is furnished to do so, subject to the following conditions:

# The above copyright notice and this permission notice shall be included in all copies or substantial portions of
# the Software.

# THE SOFTWARE IS PROVIDED “AS IS”, WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED, INCLUDING BUT NOT LIMITED TO
# THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL
# THE AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION
# OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER
# DEALINGS IN THE SOFTWARE.

import os
import argparse
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field, PositiveInt, field_validator

from ..base import consts
from ..calculus.equality import EqConfig
from .logging import EventLog, setup_events_logger
from .misc import parse_size


class ReducerConfig(BaseModel):
    fuel: int = Field(consts.DEFAULT_FUEL, ge=1, description="Step budget of a normalization.")
    check_preservation: bool = Field(False, description="Re-typecheck every contracted redex.")


class LoggingConfig(BaseModel):
    debug: bool = False
    trace: bool = False
    logging_dir: Optional[str] = None
    dont_save_events: bool = False
    events_retention_size: int = consts.DEFAULT_EVENTS_RETENTION
    full_path: Optional[str] = None

    @field_validator("events_retention_size", mode="before")
    @classmethod
    def _size(cls, value):
        return parse_size(value)


class SuiteConfig(BaseModel):
    cases: Dict[str, PositiveInt] = Field(
        default_factory=dict, description="Case counts of single properties, e.g. theorems.chain_rule."
    )

    @field_validator("cases", mode="before")
    @classmethod
    def _assignments(cls, value):
        if not isinstance(value, (list, tuple)):
            return value
        counts = {}
        for item in value:
            name, sep, count = item.partition("=")
            if not sep or not name.strip():
                raise ValueError(f"expected PROPERTY=N, got {item!r}")
            counts[name.strip()] = count.strip()
        return counts


class DiffcalcConfig(BaseModel):
    """Everything the command line can configure, one section per concern."""

    reducer: ReducerConfig = Field(default_factory=ReducerConfig)
    equality: EqConfig = Field(default_factory=EqConfig)
    logging: LoggingConfig = Field(default_factory=LoggingConfig)
    suite: SuiteConfig = Field(default_factory=SuiteConfig)


def check_config(config: DiffcalcConfig) -> Optional[EventLog]:
    r"""
    Checks the config and prepares the logging directory.

    Returns:
        The events logger when events are saved, otherwise None.
    """
    if config.logging.logging_dir is None:
        return None

    full_path = os.path.expanduser(config.logging.logging_dir)
    config.logging.full_path = full_path
    if not os.path.exists(full_path):
        os.makedirs(full_path, exist_ok=True)

    if config.logging.dont_save_events:
        return None
    return setup_events_logger(full_path, config.logging.events_retention_size)


def add_args(parser: argparse.ArgumentParser):
    """
    Adds the dotted configuration flags to the parser.
    """

    parser.add_argument(
        "--reducer.fuel",
        "--fuel",
        type=int,
        help="Maximum number of reduction steps.",
        default=None,
    )

    parser.add_argument(
        "--reducer.check_preservation",
        action="store_true",
        help="Typecheck both sides of every step and fail on a type change.",
        default=None,
    )

    parser.add_argument(
        "--equality.trials",
        "--trials",
        type=int,
        help="Random instantiations tried when comparing open terms.",
        default=None,
    )

    parser.add_argument(
        "--equality.seed",
        "--seed",
        type=int,
        help=f"Seed of every random choice (env {consts.SEED_ENV_VAR}, default {consts.DEFAULT_SEED}).",
        default=None,
    )

    parser.add_argument(
        "--equality.fuel",
        type=int,
        help="Step budget of each normalization inside an equality check.",
        default=None,
    )

    parser.add_argument(
        "--suite.cases",
        action="append",
        metavar="PROPERTY=N",
        help="Cases of one property, e.g. theorems.chain_rule=20; repeatable.",
        default=None,
    )

    parser.add_argument(
        "--logging.debug",
        action="store_true",
        help="Log at debug level.",
        default=None,
    )

    parser.add_argument(
        "--logging.trace",
        "--trace",
        action="store_true",
        help="Print reduction traces and log every fired rule.",
        default=None,
    )

    parser.add_argument(
        "--logging.logging_dir",
        type=str,
        help="Directory for the events log.",
        default=None,
    )

    parser.add_argument(
        "--logging.dont_save_events",
        action="store_true",
        help="If set, we dont save events to a log file.",
        default=None,
    )

    parser.add_argument(
        "--logging.events_retention_size",
        type=str,
        help="Events retention size, e.g. 16MB.",
        default=None,
    )


def config(args: argparse.Namespace) -> DiffcalcConfig:
    """
    Folds the dotted flags of ``args`` into a validated DiffcalcConfig.

    Flags left unset keep the model defaults, and ``--fuel`` also bounds
    equality checks unless ``--equality.fuel`` is given.
    """
    sections: Dict[str, Dict[str, Any]] = {}
    for key, value in vars(args).items():
        if "." not in key or value is None:
            continue
        section, name = key.split(".", 1)
        sections.setdefault(section, {})[name] = value
    reducer_fuel = sections.get("reducer", {}).get("fuel")
    if reducer_fuel is not None:
        sections.setdefault("equality", {}).setdefault("fuel", reducer_fuel)
    return DiffcalcConfig(**sections)
