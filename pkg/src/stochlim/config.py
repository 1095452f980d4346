"""Flat dotted-key run configuration: parsing, validation, serialisation.

The format is one ``section.key = value`` assignment per line, ``#`` for
comments.  Unknown keys are rejected outright (fail-fast), every key has a
typed default, and ``parse(serialise(cfg))`` reproduces ``cfg`` exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .funcspace import (
    MassiveDispersion,
    MasslessDispersion,
    SpectralProfile,
    gaussian,
    radial_reduce,
)

__all__ = ["RunConfig", "SCHEMA", "build_profile", "build_model_matrix"]


def _parse_float(s: str) -> float:
    return float(s)


def _parse_int(s: str) -> int:
    return int(s)


def _parse_floats(s: str) -> tuple:
    return tuple(float(p) for p in s.split(",") if p.strip())


def _parse_complexes(s: str) -> tuple:
    return tuple(complex(p.strip()) for p in s.split(",") if p.strip())


def _parse_matrix(s: str) -> tuple:
    rows = []
    for row in s.split(";"):
        rows.append(tuple(complex(p.strip()) for p in row.split(",") if p.strip()))
    if len({len(r) for r in rows}) != 1:
        raise ValueError("ragged matrix")
    return tuple(rows)


def _fmt_complex(z: complex) -> str:
    return repr(complex(z)).strip("()")


def _serialize(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, bool):
        raise TypeError("no boolean keys in the schema")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, complex):
        return _fmt_complex(value)
    if isinstance(value, tuple):
        if value and isinstance(value[0], tuple):
            return ";".join(",".join(_fmt_complex(z) for z in row)
                            for row in value)
        if value and isinstance(value[0], complex):
            return ",".join(_fmt_complex(z) for z in value)
        return ",".join(repr(float(v)) for v in value)
    raise TypeError(f"cannot serialise config value {value!r}")


def _choice(*options):
    def parse(s: str) -> str:
        if s not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return s

    return parse


# key -> (parser, default)
SCHEMA = {
    "profile.kind": (_choice("synthetic", "massless", "massive"), "synthetic"),
    "profile.omega0": (_parse_float, 2.0),
    "profile.scale": (_parse_float, 1.0),
    "profile.width": (_parse_float, 1.0),
    "profile.center": (_parse_float, 2.0),
    "profile.poly": (_parse_complexes, (complex(1.0),)),
    "profile.dimension": (_parse_int, 3),
    "profile.mass": (_parse_float, 0.5),
    "profile.formfactor.width": (_parse_float, 1.0),
    "profile.formfactor.center": (_parse_float, 1.0),
    "profile.formfactor.poly": (_parse_complexes, (complex(1.0),)),
    "lambda.grid": (_parse_floats, (0.3, 0.2, 0.15, 0.1, 0.07, 0.05)),
    "time.grid": (_parse_floats, (0.5, 1.0, 2.0)),
    "expansion.theorem": (_choice("fullline", "simplex", "halfline"),
                          "fullline"),
    "expansion.order": (_parse_int, 1),
    "expansion.f.width": (_parse_float, 1.0),
    "expansion.f.center": (_parse_float, 0.3),
    "expansion.phi.width": (_parse_float, 1.0),
    "expansion.phi.center": (_parse_float, 0.2),
    "expansion.simplex.cutoff": (_parse_float, 1.0),
    "expansion.simplex.endpoint": (_parse_float, 0.6),
    "expansion.slope.min": (_parse_float, -1.0),
    "expansion.slope.max": (_parse_float, 1e9),
    "model.kind": (_choice("linear", "rwa_matrix", "spin_boson"), "linear"),
    "model.coupling": (lambda s: complex(s), complex(1.0)),
    "model.matrix": (_parse_matrix, ((complex(0.6), complex(0.1)),
                                     (complex(0.0), complex(0.4)))),
    "model.delta": (_parse_float, 1.2),
    "model.ode_step": (_parse_float, 1e-3),
    "fock.grid_size": (_parse_int, 64),
    "fock.tau_max": (_parse_float, 8.0),
    "fock.truncation": (_parse_int, 3),
    "fock.draws": (_parse_int, 10),
    "fock.seed": (_parse_int, 7),
    "tol.quadrature": (_parse_float, 1e-11),
    "tol.gap": (_parse_float, 1e-6),
    "tol.oracle": (_parse_float, 1e-6),
    "tol.ode": (_parse_float, 1e-8),
    "tol.defect": (_parse_float, 1e-10),
    "series.tol": (_parse_float, 1e-12),
}

_POSITIVE_TOLS = tuple(k for k in SCHEMA if k.startswith("tol.")) + ("series.tol",)


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration; values are typed per the schema."""

    values: dict

    def __getitem__(self, key: str):
        return self.values[key]

    @classmethod
    def defaults(cls) -> "RunConfig":
        return cls({k: default for k, (_, default) in SCHEMA.items()})

    @classmethod
    def parse(cls, text: str) -> "RunConfig":
        values = {k: default for k, (_, default) in SCHEMA.items()}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(
                    f"line {lineno}: expected 'key = value', got {raw!r}",
                    key=raw.strip(),
                )
            key, _, val = line.partition("=")
            key = key.strip()
            val = val.strip()
            if key not in SCHEMA:
                raise ConfigError(f"unknown configuration key '{key}'", key=key)
            parser, _ = SCHEMA[key]
            try:
                values[key] = parser(val)
            except (ValueError, TypeError) as exc:
                raise ConfigError(
                    f"bad value for '{key}': {exc}", key=key
                ) from exc
        cfg = cls(values)
        cfg._validate()
        return cfg

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.parse(fh.read())

    def _validate(self) -> None:
        for key in _POSITIVE_TOLS:
            if not self.values[key] > 0.0:
                raise ConfigError(f"'{key}' must be positive", key=key)
        lam = self.values["lambda.grid"]
        if any(not 0.0 < v < 1.0 for v in lam):
            raise ConfigError("'lambda.grid' values must lie in (0, 1)",
                              key="lambda.grid")
        if any(a <= b for a, b in zip(lam, lam[1:])):
            raise ConfigError("'lambda.grid' must be strictly decreasing",
                              key="lambda.grid")

    def replace(self, **updates) -> "RunConfig":
        values = dict(self.values)
        for key, val in updates.items():
            if key not in SCHEMA:
                raise ConfigError(f"unknown configuration key '{key}'", key=key)
            values[key] = val
        cfg = RunConfig(values)
        cfg._validate()
        return cfg

    def serialize(self) -> str:
        lines = [f"{k} = {_serialize(self.values[k])}" for k in sorted(SCHEMA)]
        return "\n".join(lines) + "\n"


def build_profile(cfg: RunConfig) -> SpectralProfile:
    kind = cfg["profile.kind"]
    if kind == "synthetic":
        shape = gaussian(cfg["profile.width"], cfg["profile.center"],
                         cfg["profile.poly"]).scaled(cfg["profile.scale"])
        return SpectralProfile.synthetic(shape, label="synthetic")
    form = gaussian(cfg["profile.formfactor.width"],
                    cfg["profile.formfactor.center"],
                    cfg["profile.formfactor.poly"])
    if kind == "massless":
        return radial_reduce(MasslessDispersion(), form,
                             cfg["profile.dimension"])
    return radial_reduce(MassiveDispersion(cfg["profile.mass"]), form,
                         cfg["profile.dimension"])


def build_model_matrix(cfg: RunConfig) -> np.ndarray:
    return np.array(cfg["model.matrix"], dtype=complex)
