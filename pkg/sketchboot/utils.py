import argparse
from pathlib import Path

from .bootstrap import normalize_index_set
from .exceptions import ConfigError
from .matrixio import read_matrix
from .sketchers import squared_length_probabilities, uniform_probabilities, validate_probabilities

PROBABILITY_RULES = ('uniform', 'sqlen')

# '500:6000:500' to [500, 1000, ..., 6000]; '256,1024' to [256, 1024]
def parse_grid(grid_string):
    grid_string = grid_string.strip()
    try:
        if ':' in grid_string:
            start, stop, step = (int(part) for part in grid_string.split(':'))
            if step < 1:
                raise ConfigError(f'grid step must be positive, got {step}')
            grid = list(range(start, stop + 1, step))
        else:
            grid = [int(part) for part in grid_string.split(',') if part.strip()]
    except ValueError as exc:
        raise ConfigError(f'invalid grid {grid_string!r}') from exc

    if not grid or grid[0] < 1:
        raise ConfigError(f'grid {grid_string!r} must hold positive sizes')
    if any(later <= earlier for earlier, later in zip(grid, grid[1:])):
        raise ConfigError(f'grid {grid_string!r} must be strictly ascending')

    return grid

# '3,1,2' to (1, 2, 3)
def parse_index_set(index_string):
    try:
        return normalize_index_set(part for part in index_string.split(',') if part.strip())
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc

# 'sqlen' to ('sqlen', None); 'file:data/p.raw' to ('file', PosixPath('data/p.raw'))
def parse_probabilities_flag(probs_string):
    if probs_string in PROBABILITY_RULES:
        return probs_string, None
    if probs_string.startswith('file:') and len(probs_string) > len('file:'):
        return 'file', Path(probs_string[len('file:'):])

    raise argparse.ArgumentTypeError(
        f'expected uniform, sqlen or file:<path>, got {probs_string!r}'
    )

def resolve_probabilities(rule, source, n):
    """Turn a parsed --probs flag into a probability vector of length n."""
    name, path = rule
    if name == 'uniform':
        return uniform_probabilities(n)
    if name == 'sqlen':
        return squared_length_probabilities(source)

    return validate_probabilities(read_matrix(path).data, n=n)

def positive_int(value):
    try:
        number = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f'expected an integer, got {value!r}') from exc
    if number < 1:
        raise argparse.ArgumentTypeError(f'expected a positive integer, got {number}')

    return number

def seed_int(value):
    try:
        number = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f'expected an integer seed, got {value!r}') from exc
    if not 0 <= number < 2 ** 64:
        raise argparse.ArgumentTypeError(f'seed must be an unsigned 64-bit integer, got {number}')

    return number

# '0.05' to 0.05; '1.5' is rejected
def unit_interval(value):
    try:
        number = float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f'expected a number, got {value!r}') from exc
    if not 0.0 < number < 1.0:
        raise argparse.ArgumentTypeError(f'expected a value in (0, 1), got {number}')

    return number

def positive_float(value):
    try:
        number = float(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f'expected a number, got {value!r}') from exc
    if not number > 0:
        raise argparse.ArgumentTypeError(f'expected a positive number, got {number}')

    return number
