"""Input validation helpers used by the estimators and the functional API."""
import math
from fractions import Fraction
from numbers import Integral, Real

from .exceptions import DomainError

TOL = 1e-9
E_RATIO = (math.e - 1) / math.e


def check_int(value, name, low=None, high=None):
    if isinstance(value, bool) or not isinstance(value, Integral):
        raise DomainError(f"{name} must be an integer, got {value!r}")
    value = int(value)
    if low is not None and value < low:
        raise DomainError(f"{name} must be >= {low}, got {value}")
    if high is not None and value > high:
        raise DomainError(f"{name} must be <= {high}, got {value}")
    return value


def check_real(value, name, low=None, high=None, low_open=False, high_open=False):
    if isinstance(value, bool) or not isinstance(value, Real):
        raise DomainError(f"{name} must be a real number, got {value!r}")
    if isinstance(value, float) and not math.isfinite(value):
        raise DomainError(f"{name} must be finite, got {value!r}")
    if low is not None and (value < low or (low_open and value == low)):
        bracket = "(" if low_open else "["
        raise DomainError(f"{name}={value} outside {bracket}{low}, ...")
    if high is not None and (value > high or (high_open and value == high)):
        bracket = ")" if high_open else "]"
        raise DomainError(f"{name}={value} outside ..., {high}{bracket}")
    return value


def check_epsilon(epsilon):
    return check_real(epsilon, "epsilon", 0, 1, low_open=True, high_open=True)


def check_gamma(gamma):
    return check_real(gamma, "gamma", 0, 1, low_open=True)


def check_eta(eta):
    return check_real(eta, "eta", 0, E_RATIO, high_open=True)


def as_fraction(value, max_denominator=10**6):
    """Exact rational for ``value``; floats are snapped to a nearby simple fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Integral):
        return Fraction(int(value))
    return Fraction(value).limit_denominator(max_denominator)


def integral(value, name):
    """Return ``value`` as an int if it is integral (within TOL), else raise."""
    nearest = round(value)
    if abs(value - nearest) > TOL:
        raise DomainError(f"{name} must be integral, got {value}")
    return int(nearest)
