"""Input checks shared by the estimators and the CLI."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path

from .algebra import DEFAULT_PRIME, is_prime
from .model import OdeModel, load_model, parse_model
from .prolongation import PolySystem, load_psys


def check_prime(p) -> int:
    try:
        p = int(p)
    except (TypeError, ValueError):
        raise ValueError(f"prime must be an integer, got {p!r}") from None
    if p < 2 or not is_prime(p):
        raise ValueError(f"{p} is not a prime")
    return p


def check_probability(prob) -> Fraction:
    try:
        f = Fraction(prob).limit_denominator(10**12) if isinstance(prob, float) else Fraction(prob)
    except (TypeError, ValueError, ZeroDivisionError):
        raise ValueError(f"probability must be a number, got {prob!r}") from None
    if not 0 < f < 1:
        raise ValueError("probability must lie strictly between 0 and 1")
    return f


def check_positive_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return value


def check_model(X) -> OdeModel:
    """Accept an OdeModel, a path to a ``.ode`` file, or DSL source text."""
    if isinstance(X, OdeModel):
        return X
    if isinstance(X, Path):
        return load_model(X)
    if isinstance(X, str):
        if "\n" not in X and X.endswith(".ode"):
            return load_model(X)
        return parse_model(X)
    raise TypeError(f"expected an ODE model, a path or model text, got {type(X).__name__}")


def check_system(X) -> PolySystem:
    """Accept a PolySystem or ``.psys`` text."""
    if isinstance(X, PolySystem):
        return X
    if isinstance(X, str):
        return load_psys(X)
    raise TypeError(f"expected a polynomial system, got {type(X).__name__}")


def check_is_fitted(est, attr: str) -> None:
    if not hasattr(est, attr):
        raise NotFittedError(f"{type(est).__name__} is not fitted yet; call fit first")


class NotFittedError(ValueError, AttributeError):
    pass


__all__ = ["DEFAULT_PRIME", "check_prime", "check_probability", "check_positive_int",
           "check_model", "check_system", "check_is_fitted", "NotFittedError"]
