"""Experiment configuration: a TOML file with nested sections.

Example::

    [protocol]
    kind = "np"              # np | oracle | toy | certificate
    checker = "perfect"      # perfect | noisy
    noise_bits = 2           # noisy checker only
    gamma = 2                # oracle: number of queries per input
    normalize = false        # map payments to (R + 1) / 2 first
    wrap = false             # two-prover communication reduction
    bind_first_message = true
    corruption = "none"      # none | swap-zero-one (testing aid)

    [[inputs]]
    name = "phi1"
    formulas = ["phi1.cnf"]  # DIMACS files, relative to this file
    label = "member"         # member | nonmember

    [[inputs]]
    bits = "110"             # toy protocol inputs
    label = "member"

    [analysis]
    steps = ["gap", "decide", "transform", "amplify"]
    gap_gamma = 3            # utility-gap threshold to test (optional)
    intervals = 6            # N for the interval decider

    [transform]
    gamma = 3                # rounding granularity and gap condition

    [amplify]
    gamma_prime = 6
    n = 16
    # c = "3/5"; s = "2/5"  # override the extracted parameters
    # rho = 16               # override the repetition count (small spot checks)

    [caps]
    profiles = 1048576
    tapes = 1048576

    [output]
    path = "report.json"     # relative to this file
    format = "json"          # json | csv
    seed = 0
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from ..errors import ConfigInvalid
from ..strategies import Caps

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

STEPS = ("gap", "decide", "transform", "amplify")
KINDS = ("np", "oracle", "toy", "certificate")
CHECKERS = ("perfect", "noisy")
LABELS = ("member", "nonmember")
CORRUPTIONS = ("none", "swap-zero-one")


@dataclass(frozen=True)
class InputSpec:
    name: str
    label: str
    formulas: tuple[Path, ...] = ()
    bits: str | None = None


@dataclass
class ExperimentConfig:
    kind: str = "np"
    checker: str = "perfect"
    noise_bits: int = 2
    gamma: int = 1
    normalize: bool = False
    wrap: bool = False
    bind_first_message: bool = True
    corruption: str = "none"
    inputs: list[InputSpec] = field(default_factory=list)
    steps: tuple[str, ...] = ("gap",)
    gap_gamma: Fraction | None = None
    intervals: int | None = None
    transform_gamma: Fraction | None = None
    gamma_prime: Fraction | None = None
    n: int | None = None
    c: Fraction | None = None
    s: Fraction | None = None
    rho: int | None = None
    caps: Caps = field(default_factory=Caps)
    out: Path | None = None
    format: str = "json"
    seed: int = 0
    source: Path | None = None

    def echo(self) -> dict:
        """Plain-data view of the configuration for the report."""
        return {
            "protocol": {
                "kind": self.kind,
                "checker": self.checker,
                "noise_bits": self.noise_bits,
                "gamma": self.gamma,
                "normalize": self.normalize,
                "wrap": self.wrap,
                "bind_first_message": self.bind_first_message,
                "corruption": self.corruption,
            },
            "inputs": [
                {
                    "name": i.name,
                    "label": i.label,
                    "formulas": [p.name for p in i.formulas],
                    "bits": i.bits,
                }
                for i in self.inputs
            ],
            "analysis": {
                "steps": list(self.steps),
                "gap_gamma": self.gap_gamma,
                "intervals": self.intervals,
            },
            "transform": {"gamma": self.transform_gamma},
            "amplify": {"gamma_prime": self.gamma_prime, "n": self.n, "c": self.c, "s": self.s, "rho": self.rho},
            "caps": {"profiles": self.caps.profiles, "tapes": self.caps.tapes},
            "seed": self.seed,
        }


def _rational(section: dict, key: str, where: str):
    if key not in section:
        return None
    value = section[key]
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ConfigInvalid(f"{where}.{key}: expected an integer or a 'p/q' string")
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise ConfigInvalid(f"{where}.{key}: not a rational: {value!r}") from None


def _choice(section, key, options, default, where):
    value = section.get(key, default)
    if value not in options:
        raise ConfigInvalid(f"{where}.{key}: {value!r} not one of {', '.join(options)}")
    return value


def _int(section, key, default, where, minimum=None):
    value = section.get(key, default)
    if value is None:
        return None
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigInvalid(f"{where}.{key}: expected an integer")
    if minimum is not None and value < minimum:
        raise ConfigInvalid(f"{where}.{key}: must be >= {minimum}")
    return value


def _bool(section, key, default, where):
    value = section.get(key, default)
    if not isinstance(value, bool):
        raise ConfigInvalid(f"{where}.{key}: expected true or false")
    return value


def parse_config(data: dict, base_dir: Path = Path(".")) -> ExperimentConfig:
    known = {"protocol", "inputs", "analysis", "transform", "amplify", "caps", "output"}
    unknown = set(data) - known
    if unknown:
        raise ConfigInvalid(f"unknown sections: {', '.join(sorted(unknown))}")
    proto = data.get("protocol", {})
    cfg = ExperimentConfig(
        kind=_choice(proto, "kind", KINDS, "np", "protocol"),
        checker=_choice(proto, "checker", CHECKERS, "perfect", "protocol"),
        noise_bits=_int(proto, "noise_bits", 2, "protocol", minimum=2),
        gamma=_int(proto, "gamma", 1, "protocol", minimum=1),
        normalize=_bool(proto, "normalize", False, "protocol"),
        wrap=_bool(proto, "wrap", False, "protocol"),
        bind_first_message=_bool(proto, "bind_first_message", True, "protocol"),
        corruption=_choice(proto, "corruption", CORRUPTIONS, "none", "protocol"),
    )

    raw_inputs = data.get("inputs", [])
    if not isinstance(raw_inputs, list):
        raise ConfigInvalid("inputs must be an array of tables ([[inputs]])")
    for k, item in enumerate(raw_inputs):
        where = f"inputs[{k}]"
        if "label" not in item:
            raise ConfigInvalid(f"{where}: missing label")
        label = _choice(item, "label", LABELS, None, where)
        if ("formulas" in item) == ("bits" in item):
            raise ConfigInvalid(f"{where}: give exactly one of 'formulas' or 'bits'")
        if "bits" in item:
            bits = str(item["bits"])
            if not bits or set(bits) - {"0", "1"}:
                raise ConfigInvalid(f"{where}.bits: not a bit string")
            cfg.inputs.append(InputSpec(item.get("name", bits), label, bits=bits))
            continue
        paths = []
        for name in item["formulas"]:
            path = (base_dir / name).resolve()
            if not path.is_file():
                raise ConfigInvalid(f"{where}: formula file not found: {name}")
            paths.append(path)
        if not paths:
            raise ConfigInvalid(f"{where}: empty formula list")
        default_name = "+".join(p.stem for p in paths)
        cfg.inputs.append(InputSpec(item.get("name", default_name), label, tuple(paths)))

    analysis = data.get("analysis", {})
    steps = analysis.get("steps", ["gap"])
    bad = [s for s in steps if s not in STEPS]
    if bad:
        raise ConfigInvalid(f"analysis.steps: unknown {bad}; choose from {', '.join(STEPS)}")
    cfg.steps = tuple(s for s in STEPS if s in steps)
    cfg.gap_gamma = _rational(analysis, "gap_gamma", "analysis")
    cfg.intervals = _int(analysis, "intervals", None, "analysis", minimum=1)

    cfg.transform_gamma = _rational(data.get("transform", {}), "gamma", "transform")
    amp = data.get("amplify", {})
    cfg.gamma_prime = _rational(amp, "gamma_prime", "amplify")
    cfg.n = _int(amp, "n", None, "amplify", minimum=2)
    cfg.c = _rational(amp, "c", "amplify")
    cfg.s = _rational(amp, "s", "amplify")
    cfg.rho = _int(amp, "rho", None, "amplify", minimum=1)

    caps = data.get("caps", {})
    cfg.caps = Caps(
        profiles=_int(caps, "profiles", Caps.profiles, "caps", minimum=1),
        tapes=_int(caps, "tapes", Caps.tapes, "caps", minimum=1),
    )
    output = data.get("output", {})
    if "path" in output:
        cfg.out = (base_dir / output["path"]).resolve()
    cfg.format = _choice(output, "format", ("json", "csv"), "json", "output")
    cfg.seed = _int(output, "seed", 0, "output")
    check(cfg)
    return cfg


def check(cfg: ExperimentConfig):
    """Cross-field requirements of the requested steps."""
    for spec in cfg.inputs:
        if cfg.kind == "toy" and spec.bits is None:
            raise ConfigInvalid(f"input {spec.name}: toy protocol takes 'bits'")
        if cfg.kind != "toy" and spec.bits is not None:
            raise ConfigInvalid(f"input {spec.name}: {cfg.kind} protocol takes 'formulas'")
        if cfg.kind == "oracle" and len(spec.formulas) != cfg.gamma:
            raise ConfigInvalid(
                f"input {spec.name}: oracle protocol with gamma={cfg.gamma} "
                f"needs {cfg.gamma} formulas, got {len(spec.formulas)}"
            )
        if cfg.kind in ("np", "certificate") and len(spec.formulas) != 1:
            raise ConfigInvalid(f"input {spec.name}: {cfg.kind} protocol takes one formula")
    if "decide" in cfg.steps and cfg.intervals is None:
        raise ConfigInvalid("analysis.intervals is required for the decide step")
    if "transform" in cfg.steps and cfg.transform_gamma is None:
        raise ConfigInvalid("transform.gamma is required for the transform step")
    if "amplify" in cfg.steps:
        if cfg.gamma_prime is None or cfg.n is None:
            raise ConfigInvalid("amplify.gamma_prime and amplify.n are required")
        if "transform" not in cfg.steps and (cfg.c is None or cfg.s is None):
            raise ConfigInvalid("amplify without transform needs amplify.c and amplify.s")


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigInvalid(f"config file not found: {path}")
    try:
        data = tomllib.loads(path.read_text())
    except tomllib.TOMLDecodeError as exc:
        raise ConfigInvalid(f"{path}: {exc}") from None
    cfg = parse_config(data, path.parent)
    cfg.source = path
    return cfg
