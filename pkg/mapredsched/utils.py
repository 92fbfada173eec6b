"""Various utility functions for mapredsched."""
import json
import re
from typing import Any, List, Sequence, Tuple

import numpy as np

from .errors import InvalidJson, InvalidSpec

# absolute tolerances, times are in seconds and sizes in data units
COMPARE_TOL = 1e-9
FEASIBILITY_TOL = 1e-7
VIOLATION_TOL = 1e-7
BOUND_TOL = 1e-6

MAX_SEED = 2**64 - 1

def make_rng(seed: int) -> np.random.Generator:
    """Creates the seeded generator every random draw flows from.

    The algorithm is PCG64 (numpy's default bit generator), fixed here so that
    a seed reproduces the same draws on every platform.
    """
    if not 0 <= int(seed) <= MAX_SEED:
        raise InvalidSpec(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.Generator(np.random.PCG64(int(seed)))

def argmin_index(values: Sequence[float], tol: float=COMPARE_TOL) -> int:
    """Returns the index of the smallest value.

    Values within tol of the running minimum count as ties, ties go to the lowest index.
    """
    best = 0
    for i in range(1, len(values)):
        if values[i] < values[best] - tol:
            best = i
    return best

def largest(sizes: Sequence[float]) -> float:
    """Largest task of a list sorted descending, 0 for an empty list."""
    return sizes[0] if sizes else 0.0

def parse_seed_range(text: str) -> List[int]:
    """Parses a seed range like `3..7` (inclusive) or a single seed."""
    match = re.fullmatch(r'\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?', text)
    if match is None:
        raise ValueError(f'"{text}" is not a seed or a seed range a..b')
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) is not None else lo
    if hi < lo:
        raise ValueError(f'seed range "{text}" is empty')
    return list(range(lo, hi+1))

def parse_factor_range(text: str) -> Tuple[float, float]:
    """Parses a perturbation range like `0.8,1.5`."""
    parts = text.split(',')
    if len(parts) != 2:
        raise ValueError(f'"{text}" is not a range lo,hi')
    lo, hi = (float(p) for p in parts)
    return lo, hi

def parse_bool(text: str) -> bool:
    """Parses true/false style command line values."""
    value = text.strip().lower()
    if value in ('true', '1', 'yes', 'on'):
        return True
    if value in ('false', '0', 'no', 'off'):
        return False
    raise ValueError(f'"{text}" is not a boolean')

def load_json(path: str) -> Any:
    with open(path) as file:
        try:
            return json.load(file)
        except (json.JSONDecodeError, UnicodeDecodeError) as e:
            raise InvalidJson(f"{path} is not valid JSON: {e}") from e

def dump_json(data: Any) -> str:
    """Serializes output deterministically: same data, same bytes."""
    return json.dumps(data, indent=2) + '\n'
