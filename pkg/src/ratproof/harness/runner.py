"""Config-driven experiments: build, audit, gap, decide, transform, amplify."""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from datetime import datetime, timezone
from fractions import Fraction

from .. import __version__
from ..core import Input, ProtocolSpec, normalize_payments, resource_audit
from ..deciders import interval_decider
from ..errors import AuditFailed, ConfigInvalid
from ..sat import DimacsError, formula_tuple_input, read_dimacs
from ..strategies import has_gamma_gap, optimal_profiles
from ..transforms import (
    AcceptRejectProtocol,
    amplify,
    check_gap_condition,
    extract_completeness_soundness,
    round_payments_zero_one,
    threshold_acceptance_prob,
    to_accept_reject,
)
from ..zoo import (
    build_certificate_mip,
    build_communication_reduction,
    build_np_rip,
    build_oracle_query_rip,
    build_toy_constant_comm,
    noisy_sat_checker,
    parity_machine,
    perfect_sat_checker,
)
from .config import ExperimentConfig
from .report import Report

SPOT_CHECK_LIMIT = 64
SPOT_SAMPLES = 16


class _SwappedVerifier:
    """Pays 1 where the wrapped verifier pays 0 and vice versa."""

    def __init__(self, inner):
        self.inner = inner

    def send(self, view, rnd):
        return self.inner.send(view, rnd)

    def pay(self, view):
        pay = Fraction(self.inner.pay(view))
        return {Fraction(0): Fraction(1), Fraction(1): Fraction(0)}.get(pay, pay)


def swap_zero_one(spec: ProtocolSpec) -> ProtocolSpec:
    support = spec.payment_support
    if support is not None:
        support = frozenset(1 - v if v in (0, 1) else v for v in support)
    return spec.derive(
        name=f"swapped({spec.name})", verifier=_SwappedVerifier(spec.verifier), payment_support=support
    )


def build_protocol(cfg: ExperimentConfig) -> ProtocolSpec:
    cps = perfect_sat_checker() if cfg.checker == "perfect" else noisy_sat_checker(cfg.noise_bits)
    if cfg.kind == "np":
        spec = build_np_rip(cps)
    elif cfg.kind == "certificate":
        spec = build_certificate_mip(cps)
    elif cfg.kind == "oracle":
        spec = build_oracle_query_rip(parity_machine(cfg.gamma), cps)
    else:
        spec = build_toy_constant_comm()
    if cfg.normalize:
        spec = normalize_payments(spec)
    if cfg.wrap:
        spec = build_communication_reduction(
            spec, bind_first_message=cfg.bind_first_message, cap=cfg.caps.profiles
        )
    if cfg.corruption == "swap-zero-one":
        spec = swap_zero_one(spec)
    return spec


def load_inputs(cfg: ExperimentConfig) -> list[tuple[Input, str]]:
    out = []
    for item in cfg.inputs:
        if item.bits is not None:
            out.append((Input.from_bits(item.bits, item.name), item.label))
            continue
        try:
            formulas = [read_dimacs(p) for p in item.formulas]
        except DimacsError as exc:
            raise ConfigInvalid(f"input {item.name}: {exc}") from None
        if cfg.kind == "oracle":
            x = formula_tuple_input(formulas, item.name)
        else:
            x = formulas[0].as_input(item.name)
        out.append((x, item.label))
    return out


def _audit_row(spec, x, cfg) -> dict:
    a = resource_audit(spec, x, cfg.caps.profiles)
    b = a.budget
    return {
        "input": str(x),
        "runs": a.runs,
        "max_communication": a.max_communication,
        "rounds_used": a.rounds_used,
        "random_bits_consumed": a.random_bits_consumed,
        "budget": {"communication": b.communication, "message": b.message, "randomness": b.randomness},
        "violations": list(a.violations),
        "ok": a.ok,
    }


def _plain(params: dict) -> dict:
    """Protocol parameters reduced to report-safe values."""
    out = {}
    for k, v in params.items():
        if isinstance(v, dict):
            out[k] = _plain(v)
        elif isinstance(v, (bool, int, str, Fraction)) or v is None:
            out[k] = v
        else:
            out[k] = getattr(v, "name", None) or type(v).__name__
    return out


def _spot_check(amp, inputs, cfg, rng) -> list:
    rows = []
    for x, label in inputs:
        best = optimal_profiles(amp.base.spec, x, cfg.caps)
        s = best.argmax_profiles()[0]
        p = amp.base.acceptance_probability(x, s, cfg.caps)
        analytic = threshold_acceptance_prob(p, amp.rho, amp.tau)
        executed = amp.executed_acceptance(x, s, SPOT_CHECK_LIMIT)
        sampled = sum(amp.run(x, s, rng, SPOT_CHECK_LIMIT) for _ in range(SPOT_SAMPLES))
        rows.append(
            {
                "input": str(x),
                "label": label,
                "base_acceptance": p,
                "analytic": analytic,
                "executed": executed,
                "agree": analytic == executed,
                "sampled_accepts": sampled,
                "samples": SPOT_SAMPLES,
            }
        )
    return rows


def run_experiment(cfg: ExperimentConfig, timestamp: str | None = None) -> Report:
    """Run the configured steps in the fixed order and return the report.

    A failed audit stops the run before any analysis.  Writing files is left
    to the caller (see ``write_outputs``).
    """
    spec = build_protocol(cfg)
    inputs = load_inputs(cfg)
    report = Report(
        version=__version__,
        timestamp=timestamp or datetime.now(timezone.utc).isoformat(timespec="seconds"),
        config=cfg.echo(),
        protocol={"name": spec.name, "provers": spec.provers, "rounds": spec.k, "params": _plain(spec.params)},
    )

    report.audit = [_audit_row(spec, x, cfg) for x, _ in inputs]
    bad = [row["input"] for row in report.audit if not row["ok"]]
    if bad:
        raise AuditFailed(f"budget violations on {', '.join(bad)}")

    if "gap" in cfg.steps:
        for x, label in inputs:
            summary = optimal_profiles(spec, x, cfg.caps).summary()
            summary["label"] = label
            report.inputs.append(summary)
            report.gap_table.append({k: summary.get(k) for k in (
                "input", "label", "answer_bit", "optimum", "best_opposing",
                "utility_gap", "invalid_rip", "profiles", "tapes",
            )})
        if cfg.gap_gamma is not None:
            check = has_gamma_gap(spec, [x for x, _ in inputs], cfg.gap_gamma, cfg.caps)
            report.gap_check = {
                "gamma": check.gamma,
                "threshold": 1 / check.gamma,
                "holds": check.holds,
                "gaps": {str(k): v for k, v in check.gaps.items()},
            }

    if "decide" in cfg.steps:
        for x, label in inputs:
            run = interval_decider(spec, x, cfg.intervals, cfg.caps, trace=True)
            rep = optimal_profiles(spec, x, cfg.caps)
            expected = None if rep.invalid else rep.answer_bit
            report.decider.append(
                {
                    "input": str(x),
                    "label": label,
                    "N": run.N,
                    "queries": len(run.queries),
                    "top_interval": run.top,
                    "accept": run.accept,
                    "rational_answer": expected,
                    "agree": expected is not None and run.accept == expected,
                    "homogeneous": run.homogeneous,
                }
            )

    arp = None
    c = s = None
    if "transform" in cfg.steps:
        gamma = cfg.transform_gamma
        members = [x for x, lab in inputs if lab == "member"]
        nonmembers = [x for x, lab in inputs if lab == "nonmember"]
        base = normalize_payments(spec)
        gate = check_gap_condition(base, members, nonmembers, gamma, cfg.caps)
        rounded = round_payments_zero_one(base, gamma)
        arp = to_accept_reject(rounded)
        c, s = extract_completeness_soundness(arp, members, nonmembers, gamma, cfg.caps)
        arp = arp.with_parameters(c, s)
        report.transform = {
            "protocol": rounded.name,
            "provenance": _plain(rounded.params),
            "gap_condition": {
                "gamma": gamma,
                "min_member": gate.min_member,
                "max_nonmember": gate.max_nonmember,
                "holds": gate.holds,
                "vacuous": gate.vacuous,
            },
            "completeness": c,
            "soundness": s,
            # the rounding margin and the amplification gap are kept apart
            "rounding_margin": 1 / (2 * gamma),
            "gamma_prime": cfg.gamma_prime,
        }

    if "amplify" in cfg.steps:
        if cfg.c is not None:
            c, s = cfg.c, cfg.s
        synthetic = arp is None or cfg.c is not None
        if arp is None:
            arp = AcceptRejectProtocol(spec, c, s)
        amp = amplify(arp, c, cfg.gamma_prime, cfg.n, s=s, rho=cfg.rho)
        cert = amp.certificate()
        cert["synthetic_parameters"] = synthetic
        cert["rho_override"] = cfg.rho is not None
        support = arp.spec.payment_support
        zero_one = support is not None and set(support) <= {0, 1}
        if amp.rho <= SPOT_CHECK_LIMIT and zero_one:
            cert["spot_check"] = _spot_check(amp, inputs, cfg, random.Random(cfg.seed))
        report.amplification = cert

    return report


def invalid_inputs(report: Report) -> list[str]:
    return [row["input"] for row in report.inputs if row.get("invalid_rip")]


@dataclass
class ValidationSummary:
    passed: bool
    vacuous: bool
    offending: list = field(default_factory=list)
    rows: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "vacuous": self.vacuous,
            "offending": self.offending,
            "rows": self.rows,
        }


def validate_rip(cfg: ExperimentConfig) -> ValidationSummary:
    """Pass iff every input's rational answer matches its label with no INVALID-RIP."""
    spec = build_protocol(cfg)
    inputs = load_inputs(cfg)
    if not inputs:
        return ValidationSummary(True, True)
    rows, offending = [], []
    for x, label in inputs:
        want = int(label == "member")
        rep = optimal_profiles(spec, x, cfg.caps)
        got = None if rep.invalid else rep.answer_bit
        ok = got == want
        rows.append(
            {
                "input": str(x),
                "label": label,
                "rational_answer": got,
                "invalid_rip": rep.invalid,
                "optimum": rep.optimum,
                "ok": ok,
            }
        )
        if not ok:
            offending.append(str(x))
    return ValidationSummary(not offending, False, offending, rows)


__all__ = [
    "ValidationSummary",
    "build_protocol",
    "invalid_inputs",
    "load_inputs",
    "run_experiment",
    "swap_zero_one",
    "validate_rip",
]
