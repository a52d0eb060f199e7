"""INI-style configuration files and command-line overrides.

Sections [system], [lead_L], [lead_R] mirror the parameter dataclasses
field by field.  An optional [bias] section with ``delta_mu`` splits
the bias symmetrically over the two leads (overriding their
``chem_potential`` entries), and an optional [sweep] section describes
a one- or two-axis sweep.  Overrides are dotted ``section.key=value``
strings applied before the objects are built.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass
from pathlib import Path

from .model import LeadParams, ModelConfig, SystemParams

SWEEP_AXES = ("mu_tilde", "delta_mu", "lam")
OUTPUT_GROUPS = ("transport", "thermo", "phasespace", "mode")


@dataclass(frozen=True)
class SweepAxis:
    name: str
    start: float
    stop: float
    count: int

    def __post_init__(self) -> None:
        if self.name not in SWEEP_AXES:
            raise ValueError(f"unknown sweep axis {self.name!r}; expected one of {SWEEP_AXES}")
        if self.count < 1:
            raise ValueError("axis count must be >= 1")

    def values(self) -> list[float]:
        if self.count == 1:
            return [self.start]
        step = (self.stop - self.start) / (self.count - 1)
        return [self.start + i * step for i in range(self.count)]


@dataclass(frozen=True)
class SweepSpec:
    axis1: SweepAxis
    axis2: SweepAxis | None = None
    outputs: tuple[str, ...] = OUTPUT_GROUPS
    n_cut_policy: str = "fixed"
    workers: int = 1

    def __post_init__(self) -> None:
        for group in self.outputs:
            if group not in OUTPUT_GROUPS:
                raise ValueError(f"unknown output group {group!r}")
        if self.n_cut_policy not in ("fixed", "adaptive"):
            raise ValueError("n_cut_policy must be 'fixed' or 'adaptive'")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def shape(self) -> tuple[int, int]:
        return (self.axis1.count, self.axis2.count if self.axis2 else 1)


class ConfigError(ValueError):
    pass


def _parse_axis(text: str) -> SweepAxis:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise ConfigError(f"axis spec must be 'name, start, stop, count', got {text!r}")
    return SweepAxis(parts[0], float(parts[1]), float(parts[2]), int(parts[3]))


def _require_float(sec: configparser.SectionProxy, key: str) -> float:
    value = sec.getfloat(key)
    if value is None:
        raise ConfigError(f"[{sec.name}] missing key {key!r}")
    return value


def _require_int(sec: configparser.SectionProxy, key: str) -> int:
    value = sec.getint(key)
    if value is None:
        raise ConfigError(f"[{sec.name}] missing key {key!r}")
    return value


def apply_overrides(parser: configparser.ConfigParser, overrides: list[str]) -> None:
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        key, value = item.split("=", 1)
        if "." not in key:
            raise ConfigError(f"override key must be dotted section.key, got {key!r}")
        section, field = key.split(".", 1)
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section.strip(), field.strip(), value.strip())


def load_config(
    path: str | Path, overrides: list[str] | None = None
) -> tuple[ModelConfig, SweepSpec | None]:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    if overrides:
        apply_overrides(parser, overrides)
    try:
        sys_sec = parser["system"]
        system = SystemParams(
            omega=_require_float(sys_sec, "omega"),
            lam=_require_float(sys_sec, "lam"),
            mu_tilde=_require_float(sys_sec, "mu_tilde"),
            n_cut=_require_int(sys_sec, "n_cut"),
        )
        leads = {}
        for label in ("L", "R"):
            sec = parser[f"lead_{label}"]
            leads[label] = LeadParams(
                label=label,
                gamma_rate=_require_float(sec, "gamma_rate"),
                delta=_require_float(sec, "delta"),
                gamma_center=_require_float(sec, "gamma_center"),
                temperature=_require_float(sec, "temperature"),
                chem_potential=sec.getfloat("chem_potential", fallback=0.0),
            )
        config = ModelConfig(system=system, lead_L=leads["L"], lead_R=leads["R"])
        if parser.has_option("bias", "delta_mu"):
            config = config.with_bias(parser.getfloat("bias", "delta_mu"))
    except (KeyError, ValueError, TypeError) as exc:
        raise ConfigError(f"bad config file {path}: {exc}") from exc

    sweep = None
    if parser.has_section("sweep"):
        sec = parser["sweep"]
        if "axis1" not in sec:
            raise ConfigError("[sweep] section requires axis1")
        axis1 = _parse_axis(sec["axis1"])
        axis2 = _parse_axis(sec["axis2"]) if "axis2" in sec else None
        outputs = tuple(
            g.strip() for g in sec.get("outputs", ",".join(OUTPUT_GROUPS)).split(",") if g.strip()
        )
        sweep = SweepSpec(
            axis1=axis1,
            axis2=axis2,
            outputs=outputs,
            n_cut_policy=sec.get("n_cut_policy", "fixed").strip(),
            workers=sec.getint("workers", fallback=1),
        )
    return config, sweep


def config_to_dict(config: ModelConfig) -> dict:
    """Flat, picklable, json-able dump (also the CSV metadata echo)."""
    out = {
        "system.omega": config.system.omega,
        "system.lam": config.system.lam,
        "system.mu_tilde": config.system.mu_tilde,
        "system.n_cut": config.system.n_cut,
    }
    for lead in config.leads:
        pre = f"lead_{lead.label}"
        out[f"{pre}.gamma_rate"] = lead.gamma_rate
        out[f"{pre}.delta"] = lead.delta
        out[f"{pre}.gamma_center"] = lead.gamma_center
        out[f"{pre}.temperature"] = lead.temperature
        out[f"{pre}.chem_potential"] = lead.chem_potential
    return out


def config_from_dict(data: dict) -> ModelConfig:
    def lead(label: str) -> LeadParams:
        pre = f"lead_{label}"
        return LeadParams(
            label=label,
            gamma_rate=data[f"{pre}.gamma_rate"],
            delta=data[f"{pre}.delta"],
            gamma_center=data[f"{pre}.gamma_center"],
            temperature=data[f"{pre}.temperature"],
            chem_potential=data[f"{pre}.chem_potential"],
        )

    return ModelConfig(
        system=SystemParams(
            omega=data["system.omega"],
            lam=data["system.lam"],
            mu_tilde=data["system.mu_tilde"],
            n_cut=int(data["system.n_cut"]),
        ),
        lead_L=lead("L"),
        lead_R=lead("R"),
    )
