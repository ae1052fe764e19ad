class LifelineError(Exception):
    """Base class of every error raised by lifeline."""


class ScenarioSyntaxError(LifelineError):
    """Raised if a scenario document cannot be read."""
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = 'line %d: %s' % (line, message)
        super().__init__(message)


class UnresolvedReference(LifelineError):
    """Raised if a scenario refers to an id that is never defined."""
    def __init__(self, kind, name, line=None):
        self.kind, self.name, self.line = kind, name, line
        message = 'unknown %s "%s"' % (kind, name)
        if line is not None:
            message = 'line %d: %s' % (line, message)
        super().__init__(message)


class InvalidScenario(LifelineError):
    """Raised with every reference error found in one scenario document."""
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__('\n'.join(str(e) for e in self.errors))


class SchemaVersionMismatch(LifelineError):
    def __init__(self, found, expected):
        super().__init__('scenario schema version %s is not supported '
                         '(expected %s)' % (found, expected))


class ScenarioNotFound(LifelineError):
    def __init__(self, name, directory):
        super().__init__('scenario "%s" does not exist (looked in %s)'
                         % (name, directory))


class UnitMismatch(LifelineError):
    def __init__(self, expected, found):
        super().__init__('intensity given in "%s", curve expects "%s"'
                         % (found, expected))


class MissingFragilityCurve(LifelineError):
    """Raised if a hazard acts on a node that has no curve for it."""
    def __init__(self, node_id, hazard):
        self.node_id, self.hazard = node_id, hazard
        super().__init__('node "%s" has no fragility curve for %s'
                         % (node_id, hazard))


class InvalidCurve(LifelineError):
    def __init__(self, name, reason):
        super().__init__('curve "%s": %s' % (name, reason))


class InvalidProbability(LifelineError):
    def __init__(self, value):
        super().__init__('%r is not a probability' % (value,))


class EmptyGroup(LifelineError):
    def __str__(self):
        return 'a redundancy group needs at least one member'


class ConfigurationIndexError(LifelineError):
    def __init__(self, network, index):
        super().__init__('network "%s" has no configuration %d'
                         % (network, index))


class CyclicConfiguration(LifelineError):
    def __init__(self, label, cycle=()):
        self.cycle = list(cycle)
        super().__init__('configuration "%s" contains the cycle %s'
                         % (label, ' -> '.join(self.cycle)))


class SingleInflowViolation(LifelineError):
    def __init__(self, node_id, label):
        super().__init__('node "%s" has more than one supplier in '
                         'configuration "%s" (single-inflow rule)'
                         % (node_id, label))


class SolvabilityError(LifelineError):
    """Raised if I - A cannot be inverted through a convergent series."""
    def __init__(self, spectral_radius):
        self.spectral_radius = spectral_radius
        super().__init__('spectral radius %.6g >= 1, the damage vector has '
                         'no solution' % spectral_radius)


class DimensionMismatch(LifelineError):
    def __init__(self, expected, found):
        super().__init__('expected shape %s, got %s' % (expected, found))


class ConvergenceError(LifelineError):
    """Raised if a dependency cycle does not settle within the budget."""
    def __init__(self, networks, history):
        self.networks = list(networks)
        self.history = list(history)
        last = self.history[-1] if self.history else float('nan')
        super().__init__('dependency cycle %s did not converge after %d '
                         'iterations (last change %.3g)'
                         % (', '.join(self.networks), len(self.history),
                            last))


class UnknownNode(LifelineError):
    def __init__(self, node_id):
        super().__init__('node "%s" does not exist' % node_id)


class UnknownNetwork(LifelineError):
    def __init__(self, network_id):
        super().__init__('network "%s" does not exist' % network_id)


class StructuralMismatch(LifelineError):
    """Raised if a structure cannot be mapped between IIM and PRA form."""
    def __init__(self, reason):
        super().__init__('structural mismatch: %s' % reason)


class MalformedTree(LifelineError):
    def __init__(self, reason):
        super().__init__('malformed tree: %s' % reason)


class InvalidTimeline(LifelineError):
    def __init__(self, reason):
        super().__init__('invalid timeline: %s' % reason)


class InvalidWeights(LifelineError):
    def __init__(self, reason):
        super().__init__('invalid ensemble weights: %s' % reason)


class ZeroCount(LifelineError):
    def __init__(self, category):
        super().__init__('node kind "%s" has a count of zero' % category)


class UnknownCheckpoint(LifelineError):
    def __init__(self, name):
        super().__init__('checkpoint "%s" is not defined' % name)


class InvalidIntensity(LifelineError, ValueError):
    def __init__(self, intensity):
        self.intensity = intensity
        super().__init__('intensity must be nonnegative, got %r' % intensity)


class UnknownReportFormat(LifelineError, ValueError):
    def __init__(self, format, formats):
        super().__init__('unknown report format "%s" (expected one of %s)'
                         % (format, ', '.join(formats)))


class UnknownAutonomyMode(LifelineError, ValueError):
    def __init__(self, mode, modes):
        super().__init__('unknown autonomy mode "%s" (expected one of %s)'
                         % (mode, ', '.join(modes)))
