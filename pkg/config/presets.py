"""Shipped run presets, one per standard stability computation."""

import math


PRESETS: dict[str, dict] = {
    "fkpp-c3": {
        "model": "fkpp",
        "fkpp": {"delta": 1.0, "c": 3.0},
        "lambdas": [0.0, 0.5, 1.0, 5.0, 25.0],
    },
    "fkpp-c5": {
        "model": "fkpp",
        "fkpp": {"delta": 1.0, "c": 5.0},
    },
    "fkpp-c1": {
        "model": "fkpp",
        "fkpp": {"delta": 1.0, "c": 1.0},
    },
    "fkpp-essential": {
        "model": "fkpp",
        "fkpp": {"delta": 1.0, "c": 5.0 / math.sqrt(6.0)},
        "window": {"re_min": -4.0, "re_max": 2.0, "im_min": -4.0, "im_max": 4.0},
    },
    "fkpp-no-winding": {
        "model": "fkpp",
        "fkpp": {"delta": 1.0, "c": 2.4},
        "contour": {"kind": "right_half_disc", "radius": 1e6, "indent": 0.5},
    },
    "fkpp-branch": {
        "model": "fkpp",
        "fkpp": {"delta": 1.0, "c": 2.4},
        "lambdas": [1.0 - 2.4 ** 2 / 4.0],
        "at_branch_ok": True,
    },
    "fkpp-eta-track": {
        "model": "fkpp",
        "fkpp": {"delta": 1.0, "c": 2.4},
        "lambdas": [2.0],
    },
    "fkpp-crossings": {
        "model": "fkpp",
        "fkpp": {"delta": 1.0, "c": 3.0},
        "lambdas": [0.0, 0.5, 1.0, 5.0, 25.0],
    },
    "fkpp-weighted": {
        "model": "fkpp",
        "fkpp": {"delta": 1.0, "c": 3.0},
        "weights": {"nu_min": -3.0, "nu_max": 0.5, "nu_step": 0.05},
    },
    "ks": {
        "model": "ks",
        "ks": {"alpha": 1.0, "beta": 2.0, "c": 2.0, "delta": 1.0},
        "window": {"re_min": -2.0, "re_max": 1.0, "im_min": -5.0, "im_max": 5.0},
    },
    "ks-annulus": {
        "model": "ks",
        "ks": {"alpha": 1.0, "beta": 2.0, "c": 2.0, "delta": 1.0},
        "contour": {"kind": "right_half_annulus", "r_in": 4.0, "r_out": 1e7},
    },
    "ks-shifted-half-disc": {
        "model": "ks",
        "ks": {"alpha": 1.0, "beta": 2.0, "c": 2.0, "delta": 1.0},
        "contour": {"kind": "shifted_half_disc", "radius": 4.0, "shift": 0.3},
    },
    "ks-origin": {
        "model": "ks",
        "ks": {"alpha": 1.0, "beta": 2.0, "c": 2.0, "delta": 1.0},
        "contour": {"kind": "circle", "center": [0.0, 0.0], "radius": 1e-2},
    },
    "ks-absolute": {
        "model": "ks",
        "ks": {"alpha": 1.0, "beta": 2.0, "c": 2.0, "delta": 1.0},
        "window": {"re_min": -0.1, "re_max": 0.5, "im_min": -5.0, "im_max": 5.0, "n_re": 61, "n_im": 201},
        "weights": {"nu_min": -10.0, "nu_max": 10.0, "nu_step": 0.05},
    },
}
