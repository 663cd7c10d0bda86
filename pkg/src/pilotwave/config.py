"""Scenario configuration: flat ``key=value`` text with ``#`` comments.

Complex amplitudes are given as paired ``_re``/``_im`` keys.  Keys that are
absent take the scenario defaults below.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields, replace

SCENARIOS = ("double_slit", "spin_measurement", "momentum_measurement")

_GRID_DEFAULTS = {
    "double_slit": dict(x_min=-60.0, x_max=60.0, n=4096, t_final=6.0, store_every=10, output_every=10),
    "spin_measurement": dict(x_min=-30.0, x_max=30.0, n=2048, t_final=3.0, store_every=10, output_every=10),
    "momentum_measurement": dict(x_min=-120.0, x_max=120.0, n=8192, t_final=25.0, store_every=25, output_every=20),
}

_SQRT_HALF = math.sqrt(0.5)


class ConfigError(ValueError):
    """Bad configuration text or values; ``line`` and ``field`` locate it."""

    def __init__(self, message: str, line: int | None = None, field: str | None = None):
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)
        self.line = line
        self.field = field


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    x_min: float
    x_max: float
    n: int
    dt: float = 1e-3
    t_final: float = 1.0
    store_every: int = 10
    output_every: int = 10
    trajectories: int = 10_000
    seed: int = 1
    alpha: float = 0.01
    check_times: tuple[float, ...] = ()
    # double_slit
    slit_separation: float = 6.0
    slit_width: float = 0.7
    # spin_measurement
    c1: complex = complex(_SQRT_HALF, 0.0)
    c2: complex = complex(_SQRT_HALF, 0.0)
    packet_width: float = 1.0
    packet_center: float = 0.0
    field_gradient: float = 2.0
    orientation: int = 1

    @property
    def steps(self) -> int:
        return int(round(self.t_final / self.dt))

    @property
    def sample_dt(self) -> float:
        return self.dt * self.store_every

    def resolved_check_times(self) -> list[float]:
        if self.check_times:
            return list(self.check_times)
        n_store = self.steps // self.store_every
        return [self.sample_dt * (n_store * j // 4) for j in range(5)]

    def echo(self) -> dict:
        """Flat, JSON-ready view of every setting."""
        out = {}
        for k, v in asdict(self).items():
            if isinstance(v, complex):
                out[f"{k}_re"], out[f"{k}_im"] = v.real, v.imag
            elif isinstance(v, tuple):
                out[k] = list(v)
            else:
                out[k] = v
        out["check_times"] = self.resolved_check_times()
        return out

    def with_overrides(self, **kw) -> "ScenarioConfig":
        cfg = replace(self, **{k: v for k, v in kw.items() if v is not None})
        validate(cfg)
        return cfg


_FLOAT_KEYS = {
    "x_min", "x_max", "dt", "t_final", "alpha", "slit_separation", "slit_width",
    "packet_width", "packet_center", "field_gradient",
    "c1_re", "c1_im", "c2_re", "c2_im",
}
_INT_KEYS = {"n", "store_every", "output_every", "trajectories", "seed", "orientation"}
KNOWN_KEYS = _FLOAT_KEYS | _INT_KEYS | {"scenario", "check_times"}


def _convert(key: str, raw: str, line: int):
    try:
        if key in _FLOAT_KEYS:
            return float(raw)
        if key in _INT_KEYS:
            return int(raw)
        if key == "check_times":
            return tuple(float(t) for t in raw.split(",") if t.strip())
    except ValueError:
        raise ConfigError(f"cannot parse {key}={raw!r}", line, key) from None
    return raw


def parse_config(text: str, scenario: str | None = None) -> ScenarioConfig:
    """Parse config text; ``scenario`` (e.g. from the command line) wins if given."""
    values: dict = {}
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw_line.strip()!r}", lineno)
        key, _, raw = (part.strip() for part in line.partition("="))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno, key)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", lineno, key)
        values[key] = _convert(key, raw, lineno)

    if scenario is not None:
        if "scenario" in values and values["scenario"] != scenario:
            raise ConfigError(
                f"config scenario {values['scenario']!r} conflicts with requested {scenario!r}",
                field="scenario",
            )
        values["scenario"] = scenario
    return build_config(values)


def build_config(values: dict) -> ScenarioConfig:
    values = dict(values)
    scenario = values.pop("scenario", None)
    for name in ("c1", "c2"):
        re_key, im_key = f"{name}_re", f"{name}_im"
        if re_key in values or im_key in values:
            values[name] = complex(values.pop(re_key, 0.0), values.pop(im_key, 0.0))
    # generic checks run before the scenario check so the clearest error wins
    _check_generic(values)
    if scenario is None:
        raise ConfigError("scenario is required", field="scenario")
    if scenario not in SCENARIOS:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {SCENARIOS}", field="scenario")
    merged = {**_GRID_DEFAULTS[scenario], **values}
    cfg = ScenarioConfig(scenario=scenario, **merged)
    validate(cfg)
    return cfg


def _check_generic(values: dict) -> None:
    n = values.get("n")
    if n is not None and (n < 16 or n & (n - 1)):
        raise ConfigError(f"n must be a power of two >= 16, got {n}", field="n")
    c1 = values.get("c1", complex(_SQRT_HALF))
    c2 = values.get("c2", complex(_SQRT_HALF))
    norm = abs(c1) ** 2 + abs(c2) ** 2
    if abs(norm - 1.0) > 1e-12:
        raise ConfigError(f"|c1|^2 + |c2|^2 must equal 1, got {norm:.15g}", field="c1/c2")


def validate(cfg: ScenarioConfig) -> None:
    d = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    _check_generic(d)

    def bad(name, msg):
        raise ConfigError(f"{name}: {msg}", field=name)

    if not cfg.x_max > cfg.x_min:
        bad("x_max", "must exceed x_min")
    if not cfg.dt > 0:
        bad("dt", "must be positive")
    if not cfg.t_final >= 0:
        bad("t_final", "must be non-negative")
    if abs(cfg.t_final / cfg.dt - cfg.steps) > 1e-9 * max(1, cfg.steps):
        bad("t_final", f"t_final/dt = {cfg.t_final / cfg.dt} is not an integer")
    if cfg.store_every < 1 or cfg.steps % cfg.store_every:
        bad("store_every", f"must divide the step count {cfg.steps}")
    if cfg.output_every < 1:
        bad("output_every", "must be >= 1")
    if cfg.trajectories < 0:
        bad("trajectories", "must be >= 0")
    if not 0 < cfg.alpha < 1:
        bad("alpha", "must lie in (0, 1)")
    for t in cfg.check_times:
        k = t / cfg.sample_dt
        if t < 0 or t > cfg.t_final + 1e-12 or abs(k - round(k)) > 1e-9 * max(1, k):
            bad("check_times", f"{t} is not on the stored time lattice")

    if cfg.scenario == "double_slit":
        if not cfg.slit_width > 0:
            bad("slit_width", "must be positive")
        if not cfg.slit_separation / 2 > 2 * cfg.slit_width:
            bad("slit_separation", "half-separation must exceed twice the slit width")
    elif cfg.scenario == "spin_measurement":
        if not cfg.packet_width > 0:
            bad("packet_width", "must be positive")
        if cfg.packet_center != 0.0:
            bad("packet_center", "the spatial packet must be symmetric about z = 0")
        if not cfg.field_gradient > 0:
            bad("field_gradient", "must be positive")
        if cfg.orientation not in (1, -1):
            bad("orientation", "must be +1 or -1")
        if cfg.field_gradient * cfg.t_final**2 < 6 * cfg.packet_width:
            bad("t_final", "packets separate by less than 6 packet widths; raise t_final or field_gradient")
