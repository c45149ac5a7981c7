"""Default system parameters, cross-module validation and the JSON config schema."""

from __future__ import annotations

import dataclasses
import typing
from dataclasses import dataclass, field, fields, replace

import numpy as np

from .channel import ChannelConfig
from .hybrid import HybridConfig, largest_divisor_at_most
from .metrics import PowerModel
from .radar import RadarScene
from .rfselect import RfSelectConfig


@dataclass(frozen=True)
class PaperDefaults:
    n_tx: int = 120
    n_rx: int = 6
    n_streams: int = 6
    n_targets: int = 3
    n_paths: int = 10
    target_angles_deg: tuple[float, ...] = (-30.0, 0.0, 30.0)
    p_dac: float = 1e-3
    p_ps: float = 10e-3
    p_a: float = 100e-3
    p_c: float = 10.0
    dac_bits: int = 8
    p_max: float = 1.0
    r_min: float = 1.0
    beta: float = 1e-4
    beta1: float = 1e-6
    trials: int = 1000


PAPER = PaperDefaults()


@dataclass(frozen=True)
class SystemConfig:
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    power: PowerModel = field(default_factory=PowerModel)
    rfselect: RfSelectConfig = field(default_factory=RfSelectConfig)
    hybrid: HybridConfig = field(default_factory=HybridConfig)
    target_angles_deg: tuple[float, ...] = PAPER.target_angles_deg
    gain_beams: str = "all"

    @property
    def p_max(self) -> float:
        return self.power.p_max

    @property
    def l_avail(self) -> int:
        return self.rfselect.l_avail or self.channel.n_streams

    def scene(self) -> RadarScene:
        return RadarScene(target_angles=tuple(np.deg2rad(self.target_angles_deg)), n_tx=self.channel.n_tx)

    def hybrid_for(self, rho: float) -> HybridConfig:
        return replace(self.hybrid, rho=rho, p_max=self.power.p_max)

    def with_p_max(self, p_max: float) -> "SystemConfig":
        return replace(self, power=replace(self.power, p_max=p_max),
                       hybrid=replace(self.hybrid, p_max=p_max))

    def with_n_rx(self, n_rx: int) -> "SystemConfig":
        # stream count cannot exceed the receive antennas
        ns = min(self.channel.n_streams, n_rx)
        return replace(self, channel=replace(self.channel, n_rx=n_rx, n_streams=ns))


def default_system() -> SystemConfig:
    d = PAPER
    return SystemConfig(
        channel=ChannelConfig(n_tx=d.n_tx, n_rx=d.n_rx, n_streams=d.n_streams, n_paths=d.n_paths),
        power=PowerModel(dac_bits=d.dac_bits, p_dac=d.p_dac, p_ps=d.p_ps, p_a=d.p_a,
                         p_c=d.p_c, p_max=d.p_max),
        rfselect=RfSelectConfig(beta=d.beta, beta1=d.beta1, r_min=d.r_min, m_max=50),
        hybrid=HybridConfig(beta2=1e-4, n_max=100, p_max=d.p_max),
        target_angles_deg=d.target_angles_deg,
    )


def validate(system: SystemConfig, rhos=()) -> list[str]:
    """Every configuration problem found, as human-readable strings (empty if valid)."""
    out: list[str] = []
    out += system.channel.violations()
    out += system.power.violations()
    out += system.rfselect.violations()
    out += [v for v in system.hybrid.violations() if not v.startswith("rho")]
    out += system.scene().violations()
    n_p = len(system.target_angles_deg)
    if n_p > system.channel.n_streams:
        out.append(f"n_targets={n_p} exceeds n_streams={system.channel.n_streams}")
    if system.rfselect.l_avail is not None and system.rfselect.l_avail > system.channel.n_streams:
        out.append("l_avail cannot exceed n_streams")
    if abs(system.hybrid.p_max - system.power.p_max) > 0:
        out.append("hybrid.p_max must equal power.p_max")
    if system.gain_beams not in ("all", "first"):
        out.append(f"gain_beams must be 'all' or 'first', got {system.gain_beams!r}")
    for r in rhos:
        if not 0.0 <= r <= 1.0:
            out.append(f"rho out of [0,1]: {r}")
    return out


def chain_count_fallbacks(system: SystemConfig) -> dict[int, int]:
    """Candidate chain counts that do not divide N_T, mapped to the count actually used."""
    n = system.channel.n_tx
    return {l: largest_divisor_at_most(n, l) for l in range(1, system.l_avail + 1) if n % l}


# -- JSON round-trip ---------------------------------------------------------

_SECTIONS = {"channel": ChannelConfig, "power": PowerModel, "rfselect": RfSelectConfig, "hybrid": HybridConfig}


def system_to_dict(system: SystemConfig) -> dict:
    d = dataclasses.asdict(system)
    d["target_angles_deg"] = list(system.target_angles_deg)
    return d


def system_from_dict(d: dict, base: SystemConfig | None = None) -> SystemConfig:
    base = base or default_system()
    kw = {}
    for name, cls in _SECTIONS.items():
        sub = d.get(name) or {}
        known = {f.name for f in fields(cls)}
        unknown = set(sub) - known
        if unknown:
            raise KeyError(f"unknown {name} keys: {sorted(unknown)}")
        kw[name] = replace(getattr(base, name), **sub)
    extra = set(d) - set(_SECTIONS) - {"target_angles_deg", "gain_beams"}
    if extra:
        raise KeyError(f"unknown system keys: {sorted(extra)}")
    sysc = replace(base, **kw)
    if "target_angles_deg" in d:
        sysc = replace(sysc, target_angles_deg=tuple(float(a) for a in d["target_angles_deg"]))
    if "gain_beams" in d:
        sysc = replace(sysc, gain_beams=d["gain_beams"])
    if "p_max" in (d.get("power") or {}):
        sysc = sysc.with_p_max(sysc.power.p_max)
    return sysc


def _json_type(tp) -> dict:
    origin = typing.get_origin(tp)
    args = typing.get_args(tp)
    if origin is typing.Union or str(origin) == "types.UnionType":
        subs = [_json_type(a) for a in args if a is not type(None)]
        sch = subs[0] if len(subs) == 1 else {"anyOf": subs}
        return {"anyOf": [sch, {"type": "null"}]} if type(None) in args else sch
    if origin is typing.Literal:
        return {"enum": list(args)}
    if origin in (tuple, list):
        return {"type": "array", "items": _json_type(args[0]) if args else {}}
    return {int: {"type": "integer"}, float: {"type": "number"},
            str: {"type": "string"}, bool: {"type": "boolean"}}.get(tp, {})


def dataclass_schema(cls) -> dict:
    hints = typing.get_type_hints(cls)
    props = {}
    for f in fields(cls):
        sch = dict(_json_type(hints[f.name]))
        if dataclasses.is_dataclass(hints[f.name]):
            sch = dataclass_schema(hints[f.name])
        elif f.default is not dataclasses.MISSING:
            sch["default"] = list(f.default) if isinstance(f.default, tuple) else f.default
        props[f.name] = sch
    return {"type": "object", "properties": props, "additionalProperties": False}
