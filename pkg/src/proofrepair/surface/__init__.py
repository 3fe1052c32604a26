from .lexer import ParseError
from .parser import parse_items, parse_plan, parse_term
from .printer import Printer, print_term
from .resolve import ResolveError, resolve, resolve_sort
