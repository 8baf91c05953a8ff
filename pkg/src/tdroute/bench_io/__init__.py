"""Benchmark I/O: native formats, classic parsers, TD generation, CLI."""

from .bestknown import BEST_KNOWN_SOLOMON_100
from .evaluate import EvalReport, evaluate_under
from .native import (ParseError, parse_instance_text, read_instance, read_solution,
                     serialize_instance, serialize_solution, write_instance,
                     write_solution)
from .solomon import parse_homberger, parse_lilim, parse_solomon
from .tdgen import (DEFAULT_PROFILES, SpeedProfile, flatten, generate_td,
                    make_benchmark_instance, make_planted_instance, td_arc)

__all__ = [
    "BEST_KNOWN_SOLOMON_100", "EvalReport", "evaluate_under", "ParseError",
    "parse_instance_text", "read_instance", "read_solution",
    "serialize_instance", "serialize_solution", "write_instance",
    "write_solution", "parse_homberger", "parse_lilim", "parse_solomon",
    "DEFAULT_PROFILES", "SpeedProfile", "flatten", "generate_td",
    "make_benchmark_instance", "make_planted_instance", "td_arc",
]
