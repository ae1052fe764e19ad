import os
import errno

from lifeline import exceptions


def makedirs(path):
    try:
        os.makedirs(path)
    except OSError as exc:
        if exc.errno == errno.EEXIST and os.path.isdir(path):
            pass
        else:
            raise


def union(*probabilities):
    """Probability that at least one of independent events occurs."""
    survival = 1.0
    for p in probabilities:
        survival *= 1.0 - p
    return 1.0 - survival


def check_probability(value):
    if not 0.0 <= value <= 1.0:
        raise exceptions.InvalidProbability(value)
    return float(value)


def parse_chain(text):
    """
    Split a chain string such as ``"a -> b -> c"`` into its edges.
    """
    names = [name.strip() for name in text.split('->')]
    if len(names) < 2 or not all(names):
        raise ValueError('"%s" is not a chain of the form "a -> b"' % text)
    return list(zip(names[:-1], names[1:]))
