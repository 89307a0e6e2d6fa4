"""Run configuration: parsing, validation, and system construction.

Configurations are JSON documents (a file path or inline text).  Errors
are classified: malformed documents are parse errors with line/column,
wrong shapes/types/names are schema errors naming the offending key path,
and well-formed values violating a constraint (n_max too small, trials
< 1, non-PSD Gram, ...) are invariant errors.  All three surface as
ConfigError with a ``kind`` tag and exit as input errors at the CLI.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError, DomainError, ShapeError
from .spectral import SpectralSystem
from .square import BoundaryPatch, GammaSpec, Side, build_square_system

SCENARIOS = (
    "verify-cutoff",
    "coercivity-scan",
    "resolvent-scan",
    "weak-observability",
    "assumption-i",
    "assumption-ii-iii",
    "admissibility",
)

DEFAULT_EPSILON_CLUSTER = 0.5
DEFAULT_TRIALS = 100
DEFAULT_SEED = 7
DEFAULT_OUTPUT = "obskit-report.json"

_TOP_LEVEL_KEYS = {"scenario", "system", "epsilon_cluster", "trials", "seed", "T", "output_path"}
_ANGLE_PATTERN = re.compile(r"^\s*(\d+)?\s*pi\s*(?:/\s*(\d+))?\s*$", re.IGNORECASE)


def _parse_error(message: str) -> ConfigError:
    return ConfigError(f"config parse error: {message}", kind="parse")


def _schema_error(message: str) -> ConfigError:
    return ConfigError(f"config schema error: {message}", kind="schema")


def _invariant_error(message: str) -> ConfigError:
    return ConfigError(f"config invariant error: {message}", kind="invariant")


@dataclass(frozen=True)
class RunConfig:
    """A fully validated description of one scenario run.

    ``system`` is the normalized system description (always a plain dict so
    the config digest is canonical): either
    ``{"type": "square", "n_max_eigenvalue": n, "gamma": [patch, ...]}`` or
    ``{"type": "custom", "eigenvalues": [...], "gram": [[[re, im], ...]]}``;
    it is None only for the cutoff-verification scenario.
    """

    scenario: str
    system: dict | None
    epsilon_cluster: float = DEFAULT_EPSILON_CLUSTER
    trials: int = DEFAULT_TRIALS
    seed: int = DEFAULT_SEED
    T: float | None = None
    output_path: str = DEFAULT_OUTPUT

    def canonical_dict(self) -> dict:
        """The semantic inputs of the run; the output location is omitted so
        identical configurations hash identically wherever they write."""
        return {
            "scenario": self.scenario,
            "system": self.system,
            "epsilon_cluster": self.epsilon_cluster,
            "trials": self.trials,
            "seed": self.seed,
            "T": self.T,
        }

    def digest(self) -> str:
        text = json.dumps(self.canonical_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _parse_angle(value, path: str) -> float:
    if isinstance(value, bool):
        raise _schema_error(f"{path}: expected a number or an angle string, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        match = _ANGLE_PATTERN.match(value)
        if match:
            numerator = int(match.group(1)) if match.group(1) else 1
            denominator = int(match.group(2)) if match.group(2) else 1
            if denominator == 0:
                raise _schema_error(f"{path}: angle denominator cannot be zero")
            return numerator * math.pi / denominator
        raise _schema_error(
            f"{path}: unrecognized angle {value!r} (use a number or 'pi', 'pi/2', '3pi/4', ...)"
        )
    raise _schema_error(f"{path}: expected a number or an angle string, got {type(value).__name__}")


def _require_int(value, path: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise _schema_error(f"{path}: expected an integer, got {value!r}")
    return value


def _require_number(value, path: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise _schema_error(f"{path}: expected a number, got {value!r}")
    return float(value)


def _normalize_patch(raw, index: int) -> dict:
    path = f"system.gamma[{index}]"
    if not isinstance(raw, dict):
        raise _schema_error(f"{path}: expected an object with side/alpha/beta")
    unknown = set(raw) - {"side", "alpha", "beta"}
    if unknown:
        raise _schema_error(f"{path}: unknown keys {sorted(unknown)}")
    if "side" not in raw:
        raise _schema_error(f"{path}: missing required key 'side'")
    side = raw["side"]
    if not isinstance(side, str):
        raise _schema_error(f"{path}.side: expected a string")
    try:
        side_value = Side.parse(side).value
    except DomainError as exc:
        raise _schema_error(f"{path}.side: {exc}") from None
    alpha = _parse_angle(raw.get("alpha", 0.0), f"{path}.alpha")
    beta = _parse_angle(raw.get("beta", math.pi), f"{path}.beta")
    return {"side": side_value, "alpha": alpha, "beta": beta}


def _normalize_square(raw: dict) -> dict:
    unknown = set(raw) - {"type", "n_max_eigenvalue", "gamma"}
    if unknown:
        raise _schema_error(f"system: unknown keys {sorted(unknown)}")
    if "n_max_eigenvalue" not in raw:
        raise _schema_error("system.n_max_eigenvalue: missing required key")
    n_max = _require_int(raw["n_max_eigenvalue"], "system.n_max_eigenvalue")
    if n_max < 2:
        raise _invariant_error(f"system.n_max_eigenvalue must be ≥ 2, got {n_max}")
    gamma_raw = raw.get("gamma", [{"side": "bottom", "alpha": 0.0, "beta": math.pi}])
    if not isinstance(gamma_raw, list) or not gamma_raw:
        raise _schema_error("system.gamma: expected a nonempty list of patches")
    patches = [_normalize_patch(p, i) for i, p in enumerate(gamma_raw)]
    gamma = {"type": "square", "n_max_eigenvalue": n_max, "gamma": patches}
    try:
        gamma_spec_of(gamma)
    except DomainError as exc:
        raise _invariant_error(f"system.gamma: {exc}") from None
    return gamma


def _normalize_gram_entry(entry, j: int, k: int) -> complex:
    path = f"system.gram[{j}][{k}]"
    if isinstance(entry, bool):
        raise _schema_error(f"{path}: expected a number or [re, im] pair")
    if isinstance(entry, (int, float)):
        return complex(float(entry), 0.0)
    if isinstance(entry, list) and len(entry) == 2:
        re_part = _require_number(entry[0], f"{path}[0]")
        im_part = _require_number(entry[1], f"{path}[1]")
        return complex(re_part, im_part)
    raise _schema_error(f"{path}: expected a number or [re, im] pair, got {entry!r}")


def _normalize_custom(raw: dict) -> dict:
    unknown = set(raw) - {"type", "eigenvalues", "gram"}
    if unknown:
        raise _schema_error(f"system: unknown keys {sorted(unknown)}")
    for key in ("eigenvalues", "gram"):
        if key not in raw:
            raise _schema_error(f"system.{key}: missing required key")
    eigenvalues = raw["eigenvalues"]
    if not isinstance(eigenvalues, list) or not eigenvalues:
        raise _schema_error("system.eigenvalues: expected a nonempty list of numbers")
    eig = [_require_number(v, f"system.eigenvalues[{i}]") for i, v in enumerate(eigenvalues)]
    gram_raw = raw["gram"]
    if not isinstance(gram_raw, list):
        raise _schema_error("system.gram: expected a list of rows")
    if len(gram_raw) != len(eig):
        raise _invariant_error(
            f"system.gram has {len(gram_raw)} rows for {len(eig)} eigenvalues"
        )
    gram: list[list[list[float]]] = []
    for j, row in enumerate(gram_raw):
        if not isinstance(row, list):
            raise _schema_error(f"system.gram[{j}]: expected a list")
        if len(row) != len(eig):
            raise _invariant_error(
                f"system.gram[{j}] has {len(row)} entries for {len(eig)} eigenvalues"
            )
        gram.append([])
        for k, entry in enumerate(row):
            z = _normalize_gram_entry(entry, j, k)
            gram[j].append([z.real, z.imag])
    # Hermiticity is a schema-level property of the document: name the offender.
    for j in range(len(eig)):
        for k in range(j, len(eig)):
            a = complex(gram[j][k][0], gram[j][k][1])
            b = complex(gram[k][j][0], gram[k][j][1])
            if abs(a - b.conjugate()) > 1e-12:
                raise _schema_error(
                    f"system.gram[{j}][{k}] = {a} is not the conjugate of "
                    f"system.gram[{k}][{j}] = {b}"
                )
    spec = {"type": "custom", "eigenvalues": eig, "gram": gram}
    try:
        system_of({"scenario": "", "system": spec})  # validate invariants eagerly
    except ConfigError:
        raise
    return spec


def _default_system(scenario: str) -> dict | None:
    if scenario == "verify-cutoff":
        return None
    if scenario == "assumption-i":
        return {
            "type": "square",
            "n_max_eigenvalue": 200,
            "gamma": [
                {"side": "bottom", "alpha": 0.0, "beta": math.pi},
                {"side": "left", "alpha": 0.0, "beta": math.pi},
            ],
        }
    if scenario == "assumption-ii-iii":
        return {
            "type": "square",
            "n_max_eigenvalue": 200,
            "gamma": [{"side": "bottom", "alpha": math.pi / 4.0, "beta": math.pi / 2.0}],
        }
    return {
        "type": "square",
        "n_max_eigenvalue": 50,
        "gamma": [{"side": "bottom", "alpha": 0.0, "beta": math.pi}],
    }


def _normalize_system(raw, scenario: str) -> dict | None:
    if raw is None:
        return _default_system(scenario)
    if not isinstance(raw, dict):
        raise _schema_error("system: expected an object")
    kind = raw.get("type")
    if kind == "square":
        spec = _normalize_square(raw)
    elif kind == "custom":
        spec = _normalize_custom(raw)
    else:
        raise _schema_error(f"system.type: expected 'square' or 'custom', got {kind!r}")
    if scenario in ("assumption-i", "assumption-ii-iii") and spec["type"] != "square":
        raise _invariant_error(f"scenario {scenario} requires a square system")
    if scenario == "assumption-i":
        expected = {("bottom", 0.0, math.pi), ("left", 0.0, math.pi)}
        got = {(p["side"], p["alpha"], p["beta"]) for p in spec["gamma"]}
        if got != expected:
            raise _invariant_error(
                "scenario assumption-i requires gamma to be the full bottom and left sides"
            )
    if scenario == "assumption-ii-iii":
        sides = {patch["side"] for patch in spec["gamma"]}
        if len(sides) != 1:
            raise _invariant_error(
                "scenario assumption-ii-iii requires all patches on a single side"
            )
    return spec


def load_config(source, *, default_scenario: str | None = None) -> RunConfig:
    """Parse and validate a configuration from a file path or inline text.

    ``default_scenario`` fills in the scenario when the document omits it
    (the CLI passes its subcommand); a document that names a different
    scenario than the default is rejected as an invariant violation.
    """
    if isinstance(source, Path):
        path: Path | None = source
    elif isinstance(source, str) and "{" not in source:
        path = Path(source)
    else:
        path = None

    if path is not None:
        if not path.exists():
            raise _parse_error(f"config file not found: {path}")
        text = path.read_text(encoding="utf-8")
    else:
        text = str(source)

    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise _parse_error(f"line {exc.lineno} column {exc.colno}: {exc.msg}") from None

    if not isinstance(raw, dict):
        raise _schema_error(f"top level must be an object, got {type(raw).__name__}")
    unknown = set(raw) - _TOP_LEVEL_KEYS
    if unknown:
        raise _schema_error(f"unknown top-level keys {sorted(unknown)}")

    scenario = raw.get("scenario", default_scenario)
    if scenario is None:
        raise _schema_error("scenario: missing (give it in the config or pick a subcommand)")
    if not isinstance(scenario, str) or scenario not in SCENARIOS:
        raise _schema_error(f"scenario: expected one of {list(SCENARIOS)}, got {scenario!r}")
    if default_scenario is not None and scenario != default_scenario:
        raise _invariant_error(
            f"config names scenario {scenario!r} but the subcommand is {default_scenario!r}"
        )

    epsilon = raw.get("epsilon_cluster", DEFAULT_EPSILON_CLUSTER)
    epsilon = _require_number(epsilon, "epsilon_cluster")
    if not epsilon > 0:
        raise _invariant_error(f"epsilon_cluster must be positive, got {epsilon}")

    trials = _require_int(raw.get("trials", DEFAULT_TRIALS), "trials")
    if trials < 1:
        raise _invariant_error(f"trials must be ≥ 1, got {trials}")

    seed = _require_int(raw.get("seed", DEFAULT_SEED), "seed")

    T = raw.get("T")
    if T is not None:
        T = _require_number(T, "T")
        if not T > 0:
            raise _invariant_error(f"T must be positive, got {T}")

    output_path = raw.get("output_path", DEFAULT_OUTPUT)
    if not isinstance(output_path, str) or not output_path:
        raise _schema_error("output_path: expected a nonempty string")

    system = _normalize_system(raw.get("system"), scenario)
    return RunConfig(
        scenario=scenario,
        system=system,
        epsilon_cluster=epsilon,
        trials=trials,
        seed=seed,
        T=T,
        output_path=output_path,
    )


def default_config(scenario: str) -> RunConfig:
    """The built-in configuration used when no config document is given."""
    if scenario not in SCENARIOS:
        raise _schema_error(f"scenario: expected one of {list(SCENARIOS)}, got {scenario!r}")
    return RunConfig(scenario=scenario, system=_default_system(scenario))


def apply_overrides(
    cfg: RunConfig,
    *,
    seed: int | None = None,
    trials: int | None = None,
    T: float | None = None,
    output_path: str | None = None,
) -> RunConfig:
    """Apply CLI flag overrides on top of a loaded configuration."""
    updates: dict = {}
    if seed is not None:
        updates["seed"] = seed
    if trials is not None:
        if trials < 1:
            raise _invariant_error(f"trials must be ≥ 1, got {trials}")
        updates["trials"] = trials
    if T is not None:
        if not T > 0:
            raise _invariant_error(f"T must be positive, got {T}")
        updates["T"] = T
    if output_path is not None:
        updates["output_path"] = output_path
    return replace(cfg, **updates) if updates else cfg


def gamma_spec_of(system_spec: dict) -> GammaSpec:
    """GammaSpec from a normalized square system description."""
    patches = tuple(
        BoundaryPatch(side=Side.parse(p["side"]), alpha=p["alpha"], beta=p["beta"])
        for p in system_spec["gamma"]
    )
    return GammaSpec(patches)


def system_of(cfg) -> SpectralSystem:
    """Build the SpectralSystem described by a RunConfig (or normalized dict)."""
    spec = cfg["system"] if isinstance(cfg, dict) else cfg.system
    if spec is None:
        raise _invariant_error("this scenario requires a system description")
    if spec["type"] == "square":
        return build_square_system(spec["n_max_eigenvalue"], gamma_spec_of(spec))
    eig = np.array(spec["eigenvalues"], dtype=float)
    gram = np.array(
        [[complex(cell[0], cell[1]) for cell in row] for row in spec["gram"]], dtype=complex
    )
    try:
        return SpectralSystem(eigenvalues=eig, gram=gram, label="custom system")
    except (DomainError, ShapeError) as exc:
        raise _invariant_error(f"system: {exc}") from None
