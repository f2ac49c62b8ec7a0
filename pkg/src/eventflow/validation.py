"""Shared argument checks used by the pipeline, estimators, CLI and server."""

from __future__ import annotations

from .model import EventTypeRegistry

METHODS = ("sa", "mcp", "msp")


def ensure_method(method: str) -> str:
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}, got {method!r}")
    return method


def ensure_positive(value: float, name: str) -> None:
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")


def ensure_fraction(value: float, name: str) -> None:
    if not 0.0 < value <= 1.0:
        raise ValueError(f"{name} must be in (0, 1], got {value}")


def ensure_support(value: float, name: str = "min_support") -> None:
    if not 0.0 <= value < 1.0:
        raise ValueError(f"{name} must be in [0, 1), got {value}")


def resolve_event_filter(
    registry: EventTypeRegistry, names: list[str] | None
) -> list[int] | None:
    """Map event-type names to ids, sorted by id. None passes through."""
    if names is None:
        return None
    unknown = sorted(n for n in names if n not in registry)
    if unknown:
        raise ValueError(f"unknown event type(s): {', '.join(unknown)}")
    return sorted(registry.id_of(n) for n in set(names))
