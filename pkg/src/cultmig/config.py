"""Run configuration: a TOML file of ``key = value`` pairs plus CLI overrides."""

from dataclasses import asdict, dataclass, fields
from pathlib import Path

import tomli

from .exceptions import ConfigurationError
from .flows import ESTIMATORS
from .ingest import resolve_data_dir

THRESHOLD_MODES = ("recompute", "paper")


@dataclass(frozen=True)
class RunConfig:
    data_dir: Path
    out_dir: Path = Path("out")
    thresholds: str = "recompute"
    flow_estimator: str = "positive_diff"
    sparse_rule: bool = True

    def __post_init__(self):
        object.__setattr__(self, "data_dir", Path(self.data_dir))
        object.__setattr__(self, "out_dir", Path(self.out_dir))
        object.__setattr__(self, "flow_estimator", self.flow_estimator.replace("-", "_"))
        if self.thresholds not in THRESHOLD_MODES:
            raise ConfigurationError(f"thresholds must be one of {THRESHOLD_MODES}")
        if self.flow_estimator not in ESTIMATORS:
            raise ConfigurationError(f"flow_estimator must be one of {ESTIMATORS}")
        if not isinstance(self.sparse_rule, bool):
            raise ConfigurationError("sparse_rule must be true or false")

    def analysis_params(self):
        return {
            "thresholds": self.thresholds,
            "flow_estimator": self.flow_estimator,
            "sparse_rule": self.sparse_rule,
        }

    def echo(self):
        out = asdict(self)
        out["data_dir"] = str(self.data_dir)
        out["out_dir"] = str(self.out_dir)
        return out


def read_config_file(path):
    try:
        with open(path, "rb") as fh:
            values = tomli.load(fh)
    except tomli.TOMLDecodeError as exc:
        raise ConfigurationError(f"{path}: {exc}") from None
    known = {f.name for f in fields(RunConfig)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigurationError(f"{path}: unknown key(s) {', '.join(unknown)}")
    return values


def build_config(config_file=None, **overrides):
    """Merge file values with overrides; ``None`` overrides are ignored."""
    values = read_config_file(config_file) if config_file else {}
    values.update({k: v for k, v in overrides.items() if v is not None})
    values["data_dir"] = resolve_data_dir(values.get("data_dir"))
    return RunConfig(**values)
