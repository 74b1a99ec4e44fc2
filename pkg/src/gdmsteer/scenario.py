"""Scenarios: figure presets and the flat ``key = value`` config format.

Config grammar: one ``key = value`` pair per line, ``#`` starts a comment
line, blank lines are ignored, no sections and no repeated keys.  Keys:

    omega          (required) effective cavity frequency, > 0
    omega_r        recoil frequency, default 1
    chi, chi_pp, kappa, xi1, xi2    default 0
    delta          impurity population in [-1, 1], default 0
    lambda         field-BEC coupling, default 0
    impurity_on    true|false, default true
    branch         pos|neg (required)
    phase_policy   auto|normal|superradiant, default auto
    steering_mode  paper|reid, default paper
    allow_override true|false, default false
    lambda_min, lambda_max, points   default sweep grid
"""

from __future__ import annotations

import configparser
import dataclasses
import enum
import math
from dataclasses import dataclass
from pathlib import Path

from .model import GdmParams, ModelError, PhaseLabel, critical_coupling
from .steering import SteeringMode
from .supermode import Branch


class ConfigError(ValueError):
    pass


class PhasePolicy(enum.Enum):
    AUTO = "auto"
    FORCE_NORMAL = "normal"
    FORCE_SUPERRADIANT = "superradiant"


@dataclass(frozen=True)
class Scenario:
    params: GdmParams
    branch: Branch
    phase_policy: PhasePolicy = PhasePolicy.AUTO
    steering_mode: SteeringMode = SteeringMode.PAPER
    allow_override: bool = False
    lambda_min: float | None = None
    lambda_max: float | None = None
    points: int = 200
    name: str = ""

    @property
    def lambda_c(self) -> float:
        return critical_coupling(self.params)

    def phase_for(self, lam: float) -> PhaseLabel:
        """Phase used at ``lam``, enforcing the scenario's policy."""
        lam_c = self.lambda_c
        natural = PhaseLabel.NORMAL if lam < lam_c else PhaseLabel.SUPERRADIANT
        if self.phase_policy is PhasePolicy.AUTO:
            return natural
        forced = (PhaseLabel.NORMAL if self.phase_policy is PhasePolicy.FORCE_NORMAL
                  else PhaseLabel.SUPERRADIANT)
        if forced is not natural and not self.allow_override:
            raise ModelError(
                f"phase policy {self.phase_policy.value} rejected at lambda={lam!r} "
                f"(lambda_c={lam_c!r})")
        return forced

    def with_overrides(self, **changes) -> "Scenario":
        changes = {k: v for k, v in changes.items() if v is not None}
        return dataclasses.replace(self, **changes)


_WITH_IMPURITY = dict(omega=400.0, chi_pp=0.1, kappa=0.5, xi1=0.001, delta=0.5, impurity_on=True)
_WITHOUT_IMPURITY = dict(omega=400.0, chi_pp=0.1, impurity_on=False)

# Figure parameter sets.  chi drops out below lambda_c, so the normal-phase
# sets leave it at zero.  fig7 shows one-way steering from atoms to field,
# opposite to fig5, which only the negative branch produces.
PRESETS: dict[str, dict] = {
    "fig1": dict(params=_WITH_IMPURITY, branch="pos", phase="normal", grid=(0.01, 3.8)),
    "fig2": dict(params=_WITHOUT_IMPURITY, branch="pos", phase="normal", grid=(0.01, 9.4)),
    "fig3": dict(params=_WITH_IMPURITY, branch="neg", phase="normal", grid=(0.01, 3.8)),
    "fig4": dict(params=_WITHOUT_IMPURITY, branch="neg", phase="normal", grid=(0.01, 9.4)),
    "fig5": dict(params={**_WITH_IMPURITY, "chi": 0.1}, branch="pos", phase="superradiant", grid=(3.9, 25.0)),
    "fig6": dict(params={**_WITHOUT_IMPURITY, "chi": 0.1}, branch="pos", phase="superradiant", grid=(9.5, 25.0)),
    "fig7": dict(params={**_WITH_IMPURITY, "chi": 0.1}, branch="neg", phase="superradiant", grid=(3.9, 25.0)),
    "fig8": dict(params={**_WITHOUT_IMPURITY, "chi": 0.1}, branch="neg", phase="superradiant", grid=(9.5, 25.0)),
    # fig9/fig10 panels (c, d) use --branch neg
    "fig9": dict(params={**_WITH_IMPURITY, "chi": 0.1}, branch="pos", phase="auto", grid=(0.01, 10.0)),
    "fig10": dict(params={**_WITHOUT_IMPURITY, "chi": 0.1}, branch="pos", phase="auto", grid=(0.01, 20.0)),
}


def preset(name: str) -> Scenario:
    try:
        entry = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}") from None
    lo, hi = entry["grid"]
    return Scenario(
        params=GdmParams(**entry["params"]),
        branch=Branch.parse(entry["branch"]),
        phase_policy=PhasePolicy(entry["phase"]),
        lambda_min=lo,
        lambda_max=hi,
        name=name,
    )


_FLOAT_KEYS = ("omega", "omega_r", "chi", "chi_pp", "kappa", "xi1", "xi2", "delta",
               "lambda", "lambda_min", "lambda_max")
_KNOWN_KEYS = set(_FLOAT_KEYS) | {"impurity_on", "branch", "phase_policy", "steering_mode",
                                   "allow_override", "points"}
_REQUIRED = ("omega", "branch")


def _bool(key: str, text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"{key}: expected true or false, got {text!r}")


def parse_config_text(text: str, name: str = "") -> Scenario:
    parser = configparser.ConfigParser(
        strict=True, interpolation=None, comment_prefixes=("#",), delimiters=("=",))
    parser.optionxform = str
    try:
        parser.read_string("[scenario]\n" + text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed config: {exc}") from exc
    if len(parser.sections()) != 1:
        raise ConfigError("sections are not allowed in a scenario config")
    raw = dict(parser["scenario"])

    unknown = sorted(set(raw) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}")
    for key in _REQUIRED:
        if key not in raw:
            raise ConfigError(f"missing required key {key!r}")

    values: dict[str, float] = {}
    for key in _FLOAT_KEYS:
        if key in raw:
            try:
                values[key] = float(raw[key])
            except ValueError:
                raise ConfigError(f"{key}: not a number: {raw[key]!r}") from None
            if not math.isfinite(values[key]):
                raise ConfigError(f"{key}: must be finite")

    param_kw = {k: values[k] for k in ("omega", "omega_r", "chi", "chi_pp", "kappa", "xi1", "xi2", "delta")
                if k in values}
    if "lambda" in values:
        param_kw["lambda_coupling"] = values["lambda"]
    if "impurity_on" in raw:
        param_kw["impurity_on"] = _bool("impurity_on", raw["impurity_on"])
    # range checks named by key before GdmParams sees them
    if not -1.0 <= param_kw.get("delta", 0.0) <= 1.0:
        raise ConfigError("delta: must lie in [-1, 1]")
    if param_kw["omega"] <= 0:
        raise ConfigError("omega: must be positive")
    if param_kw.get("omega_r", 1.0) <= 0:
        raise ConfigError("omega_r: must be positive")
    if param_kw.get("lambda_coupling", 0.0) < 0:
        raise ConfigError("lambda: must be non-negative")
    try:
        params = GdmParams(**param_kw)
    except ModelError as exc:
        raise ConfigError(str(exc)) from exc

    try:
        branch = Branch.parse(raw["branch"])
    except ValueError as exc:
        raise ConfigError(f"branch: {exc}") from None
    try:
        policy = PhasePolicy(raw.get("phase_policy", "auto").strip().lower())
    except ValueError:
        raise ConfigError(f"phase_policy: unknown value {raw['phase_policy']!r}") from None
    try:
        mode = SteeringMode(raw.get("steering_mode", "paper").strip().lower())
    except ValueError:
        raise ConfigError(f"steering_mode: unknown value {raw['steering_mode']!r}") from None
    points = 200
    if "points" in raw:
        try:
            points = int(raw["points"])
        except ValueError:
            raise ConfigError(f"points: not an integer: {raw['points']!r}") from None
        if points < 2:
            raise ConfigError("points: must be at least 2")
    lo, hi = values.get("lambda_min"), values.get("lambda_max")
    if lo is not None and lo < 0:
        raise ConfigError("lambda_min: must be non-negative")
    if lo is not None and hi is not None and not lo < hi:
        raise ConfigError("lambda_max: must exceed lambda_min")
    return Scenario(
        params=params,
        branch=branch,
        phase_policy=policy,
        steering_mode=mode,
        allow_override=_bool("allow_override", raw.get("allow_override", "false")),
        lambda_min=lo,
        lambda_max=hi,
        points=points,
        name=name,
    )


def parse_config(path) -> Scenario:
    """Read a scenario file, or resolve a preset name such as ``fig1``."""
    p = Path(path)
    if str(path) in PRESETS and not p.exists():
        return preset(str(path))
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {p}: {exc.strerror}") from exc
    return parse_config_text(text, name=p.stem)
