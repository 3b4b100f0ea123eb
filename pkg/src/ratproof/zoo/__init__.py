"""Concrete protocol constructions."""

from .checkers import ClassicalProofSystem, noisy_sat_checker, perfect_sat_checker
from .np import (
    build_certificate_mip,
    build_np_rip,
    honest_np_message,
    honest_np_profile,
)
from .oracle import (
    OracleMachine,
    build_oracle_query_rip,
    honest_oracle_message,
    honest_oracle_profile,
    parity_machine,
)
from .reduction import (
    build_communication_reduction,
    conditional_payment,
    inconsistent_tapes,
    lift_profile,
)
from .toy import build_toy_constant_comm, majority

__all__ = [
    "ClassicalProofSystem",
    "OracleMachine",
    "build_certificate_mip",
    "build_communication_reduction",
    "build_np_rip",
    "build_oracle_query_rip",
    "build_toy_constant_comm",
    "conditional_payment",
    "honest_np_message",
    "honest_np_profile",
    "honest_oracle_message",
    "honest_oracle_profile",
    "inconsistent_tapes",
    "lift_profile",
    "majority",
    "noisy_sat_checker",
    "parity_machine",
    "perfect_sat_checker",
]
