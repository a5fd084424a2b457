"""Reading and writing society configurations.

TOML is the format for hand-written configs, JSON for machine round trips.
Both share one schema::

    horizon = 2000
    seed = 7
    replication_count = 20

    [[profiles]]
    name = "A"
    alpha_same = 1.0
    alpha_diff = 0.0
    link_cost = 0.222          # or: gregariousness = 5
    opportunism = 0.5
    pop_share = 0.5
    curve = { family = "sqrt", scale = 1.0 }

``gregariousness`` may replace ``link_cost``: the cost is then chosen so that
``L*(0)`` equals the requested value.
"""
from __future__ import annotations

import copy
import json
import math
import os
from typing import Any

import tomli

from ..utility import (
    AggregationCurve,
    ConfigError,
    SocietyConfig,
    TypeProfile,
    compute_L_star,
    compute_Lbar_star,
    cost_for_gregariousness,
    exogenous_homophily_index,
)

__all__ = [
    "load_config",
    "society_from_dict",
    "society_to_dict",
    "apply_overrides",
    "describe",
]

_PROFILE_KEYS = {
    "name", "alpha_same", "alpha_diff", "link_cost", "gregariousness",
    "opportunism", "pop_share", "curve",
}
_TOP_KEYS = {"profiles", "horizon", "seed", "replication_count", "preset", "sweep"}


def _num(d, key, path, errors, default=None, kind=float):
    if key not in d:
        if default is None:
            errors.append(f"{path}.{key}: required field missing")
        return default
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        errors.append(f"{path}.{key}: expected a number, got {v!r}")
        return default
    if kind is int:
        if isinstance(v, float) and not v.is_integer():
            errors.append(f"{path}.{key}: expected an integer, got {v!r}")
            return default
        return int(v)
    return float(v)


def _profile_from_dict(d: dict, path: str, errors: list) -> TypeProfile | None:
    if not isinstance(d, dict):
        errors.append(f"{path}: expected a table")
        return None
    for k in sorted(set(d) - _PROFILE_KEYS):
        errors.append(f"{path}.{k}: unknown field")
    curve_d = d.get("curve", {})
    curve = None
    if not isinstance(curve_d, dict):
        errors.append(f"{path}.curve: expected a table")
    else:
        fam = curve_d.get("family", "sqrt")
        scale = _num(curve_d, "scale", f"{path}.curve", errors, default=1.0)
        if fam not in ("sqrt", "log"):
            errors.append(f"{path}.curve.family: expected 'sqrt' or 'log', got {fam!r}")
        elif scale is not None and not scale > 0:
            errors.append(f"{path}.curve.scale: must be positive, got {scale}")
        else:
            curve = AggregationCurve(fam, scale)
    a_s = _num(d, "alpha_same", path, errors)
    a_d = _num(d, "alpha_diff", path, errors, default=0.0)
    if "link_cost" in d and "gregariousness" in d:
        errors.append(f"{path}: give either link_cost or gregariousness, not both")
        return None
    if "gregariousness" in d:
        L = _num(d, "gregariousness", path, errors, kind=int)
        if L is not None and L < 0:
            errors.append(f"{path}.gregariousness: must be nonnegative, got {L}")
            L = None
        cost = (
            cost_for_gregariousness(curve, a_s, L)
            if (curve is not None and a_s is not None and a_s > 0 and L is not None)
            else None
        )
    else:
        cost = _num(d, "link_cost", path, errors)
    gamma = _num(d, "opportunism", path, errors, default=0.0)
    share = _num(d, "pop_share", path, errors, default=1.0)
    name = d.get("name", "")
    if None in (curve, a_s, a_d, cost, gamma, share):
        return None
    try:
        return TypeProfile(a_s, a_d, cost, curve, gamma, share, str(name))
    except ConfigError as exc:
        errors.extend(path + e[len("profile"):] for e in exc.errors)
        return None


def society_from_dict(d: dict) -> SocietyConfig:
    """Validate a parsed config mapping and build the society.

    Raises
    ------
    ConfigError
        Listing every violation with its field path.
    """
    errors: list[str] = []
    if not isinstance(d, dict):
        raise ConfigError(["<root>: expected a table"])
    for k in sorted(set(d) - _TOP_KEYS):
        errors.append(f"{k}: unknown field")
    raw = d.get("profiles")
    profiles = []
    if not isinstance(raw, list) or not raw:
        errors.append("profiles: at least one profile is required")
    else:
        for n, pd in enumerate(raw):
            p = _profile_from_dict(pd, f"profiles[{n}]", errors)
            if p is not None:
                profiles.append(p)
    horizon = _num(d, "horizon", "config", errors, default=1000, kind=int)
    seed = _num(d, "seed", "config", errors, default=0, kind=int)
    reps = _num(d, "replication_count", "config", errors, default=1, kind=int)
    if isinstance(raw, list) and raw and len(profiles) == len(raw):
        total = math.fsum(p.pop_share for p in profiles)
        if abs(total - 1.0) > 1e-12:
            errors.append(f"profiles[*].pop_share: shares must sum to 1, got {total!r}")
    for label, v, ok in (
        ("horizon", horizon, horizon is not None and horizon >= 2),
        ("seed", seed, seed is not None and 0 <= seed < 2**64),
        ("replication_count", reps, reps is not None and reps >= 1),
    ):
        if v is not None and not ok:
            errors.append(f"{label}: out of range, got {v!r}")
    errors = [e.replace("config.", "") for e in errors]
    if errors:
        raise ConfigError(errors)
    return SocietyConfig(tuple(profiles), horizon, seed, reps)


def society_to_dict(cfg: SocietyConfig) -> dict:
    return {
        "horizon": cfg.horizon,
        "seed": cfg.seed,
        "replication_count": cfg.replication_count,
        "profiles": [
            {
                "name": p.name,
                "alpha_same": p.alpha_same,
                "alpha_diff": p.alpha_diff,
                "link_cost": p.link_cost,
                "opportunism": p.opportunism,
                "pop_share": p.pop_share,
                "curve": {"family": p.curve.family.value, "scale": p.curve.scale},
            }
            for p in cfg.profiles
        ],
    }


def apply_overrides(d: dict, overrides: dict[str, Any]) -> dict:
    """Return a copy of a config mapping with dotted-path overrides applied.

    ``{"profiles.2.opportunism": 0.1, "horizon": 500}``.
    """
    out = copy.deepcopy(d)
    for key, val in overrides.items():
        parts = key.split(".")
        node = out
        for p in parts[:-1]:
            node = node[int(p)] if isinstance(node, list) else node.setdefault(p, {})
        last = parts[-1]
        if isinstance(node, list):
            node[int(last)] = val
        else:
            if last == "gregariousness":
                node.pop("link_cost", None)
            if last == "link_cost":
                node.pop("gregariousness", None)
            node[last] = val
    return out


def describe(cfg: SocietyConfig) -> dict:
    """Derived quantities of every type, echoed back to the user."""
    return {
        "types": [
            {
                "type": k,
                "name": p.name,
                "L_star_0": compute_L_star(p, 0.0),
                "Lbar_star_0": compute_Lbar_star(p, 0.0),
                "h": exogenous_homophily_index(p),
                "opportunism": p.opportunism,
                "pop_share": p.pop_share,
            }
            for k, p in enumerate(cfg.profiles)
        ],
        "horizon": cfg.horizon,
        "seed": cfg.seed,
        "replication_count": cfg.replication_count,
    }


def read_mapping(path: str) -> dict:
    ext = os.path.splitext(path)[1].lower()
    with open(path, "rb") as fh:
        data = fh.read()
    try:
        if ext == ".json":
            return json.loads(data)
        return tomli.loads(data.decode("utf-8"))
    except (ValueError, tomli.TOMLDecodeError) as exc:
        raise ConfigError([f"<file>: cannot parse {path}: {exc}"]) from exc


def load_config(path: str):
    """Load a society config (TOML/JSON) or a named experiment preset.

    A file whose mapping has a ``sweep`` list becomes an ad-hoc
    :class:`~socialcapital.harness.presets.ExperimentPreset`; a bare preset
    name (e.g. ``"fig3a"``) that is not an existing path returns that preset.
    """
    from .presets import PRESETS, custom_preset, get_preset

    if not os.path.exists(path):
        if path in PRESETS:
            return get_preset(path)
        raise ConfigError([f"<file>: no such config file or preset: {path}"])
    d = read_mapping(path)
    if isinstance(d, dict) and "preset" in d:
        return get_preset(d["preset"])
    if isinstance(d, dict) and "sweep" in d:
        base = {k: v for k, v in d.items() if k != "sweep"}
        cfg = society_from_dict(base)
        sweep = d["sweep"]
        if not isinstance(sweep, list) or not sweep:
            raise ConfigError(["sweep: expected a nonempty list of override tables"])
        points = []
        errors = []
        for n, ov in enumerate(sweep):
            try:
                points.append(society_from_dict(apply_overrides(base, ov)))
            except ConfigError as exc:
                errors.extend(f"sweep[{n}]/{e}" for e in exc.errors)
            except (KeyError, IndexError, ValueError, AttributeError) as exc:
                errors.append(f"sweep[{n}]: bad override path ({exc})")
        if errors:
            raise ConfigError(errors)
        return custom_preset(os.path.splitext(os.path.basename(path))[0], cfg, points, sweep)
    return society_from_dict(d)
