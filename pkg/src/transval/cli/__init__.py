"""Command-line front-end: expression parser, dispatcher and emitters."""

from .main import EXIT_CODES, main, run
from .parser import parse, parse_exponent, parse_poly, parse_series, parse_sigma_rational

__all__ = ["EXIT_CODES", "main", "run", "parse", "parse_exponent", "parse_poly", "parse_series", "parse_sigma_rational"]
