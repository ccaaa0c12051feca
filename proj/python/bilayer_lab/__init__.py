"""Bilayer thin-film composites, existence diagrams and implicit simulation."""

from ._core import (
    ConstraintViolation,
    DomainError,
    UsageError,
    assemble_chain,
    build,
    ed_membership,
    existence_report,
    kinds,
    parse_chain,
    phi,
    pi_eps,
    reflect_check,
    sample_profile,
    simulate,
    symmetric_points,
)

__all__ = [
    "ConstraintViolation",
    "DomainError",
    "UsageError",
    "assemble_chain",
    "build",
    "ed_membership",
    "existence_report",
    "kinds",
    "parse_chain",
    "phi",
    "pi_eps",
    "reflect_check",
    "sample_profile",
    "simulate",
    "symmetric_points",
]
