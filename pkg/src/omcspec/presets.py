"""Built-in parameter sets.

``fig2``: lossless strong-strong coupling, ten phonons.
``fig4``: same couplings restricted to a single phonon, stationary time only.
``fig5``: ``fig2`` plus mechanical damping, spontaneous emission and a
thermal mirror (weak-damping limit, mbar terms dropped).
``jc``: ``fig2`` with the optomechanical coupling switched off.
"""
from __future__ import annotations

import copy

from .spectrum import FIGURE_TIMES

_FIG2 = {
    "params": {
        "delta_a": 0.0,
        "g_a": 4.0,
        "g_m": 1.2,
        "kappa": 0.5,
        "gamma_a": 0.0,
        "gamma_m": 0.0,
        "mbar": 0.0,
        "m_max": 10,
        "include_mbar_terms": False,
    },
    "filter_gamma": 0.1,
    "times": list(FIGURE_TIMES),
    "thermal": False,
}

PRESETS = {
    "fig2": _FIG2,
    "fig4": {
        **_FIG2,
        "params": {**_FIG2["params"], "m_max": 1},
        "times": [20.0],
        "peak_prominence": 0.01,
    },
    "fig5": {
        **_FIG2,
        "params": {**_FIG2["params"], "gamma_m": 0.1, "gamma_a": 0.4, "mbar": 0.1},
        "thermal": True,
    },
    "jc": {
        **_FIG2,
        "params": {**_FIG2["params"], "g_m": 0.0},
        "times": [20.0],
    },
}


def get(name: str) -> dict:
    try:
        return copy.deepcopy(PRESETS[name])
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
