"""Agent-based simulation of homophilic network formation and social capital.

Modules
-------
utility    type profiles, gregariousness and homophily index
graph      the evolving directed follow graph
dynamics   birth, meeting and linking steps; replicated trajectories
metrics    bonding, popularity and bridging capital, dominance tests
oracles    closed-form predictions with validity regimes
harness    configs, presets, parallel runs, emitters and the CLI
"""
from .utility import AggregationCurve, ConfigError, SocietyConfig, TypeProfile, compute_L_star
from .dynamics import simulate

__version__ = "0.1.0"

__all__ = ["AggregationCurve", "ConfigError", "SocietyConfig", "TypeProfile", "compute_L_star", "simulate"]
