"""Randomized trial sweeps over (function tuple, ball) configurations.

Each trial derives its own stream from (master seed, trial index), so
sweeps are reproducible and individual trials can be re-run in isolation.
The sweep maximum ratio is the empirical inequality constant for the
sampled configurations.
"""

from __future__ import annotations

import math

import numpy as np

from ..carnot.functions import random_bump
from ..carnot.group import GaugeBall
from ..rng import stream
from ..weights import BallSampler, weight_condition_sup
from .inequalities import (
    poincare_test,
    representation_check,
    sobolev_sublaplacian_test,
    sobolev_test,
)
from .spaces import leibniz_test


def _random_trial_ball(rng, group, radius_range=(0.5, 2.0), center_box=0.5):
    center = rng.uniform(-center_box, center_box, size=group.n)
    lo, hi = radius_range
    radius = math.exp(rng.uniform(math.log(lo), math.log(hi)))
    return GaugeBall(center, radius)


def check_weight_condition(group, u, vs, system, scheme, *, count=24, r_min=0.25, r_max=4.0):
    """One verdict for the sweep's weight configuration (existential in t)."""
    sampler = BallSampler(dim=group.n, center_box=1.0, r_min=r_min, r_max=r_max, count=count)
    report = weight_condition_sup(group, u, vs, system, sampler, scheme)
    verdicts = report.verdicts()
    finite = [row["t"] for row, v in zip(report.per_t, verdicts) if v == "finite-at-sampled-scales"]
    return {
        "verdict": "finite-at-sampled-scales" if finite else verdicts[0],
        "witness_t": finite[0] if finite else None,
        "exponent": report.exponent,
    }


def poincare_sweep(group, system, u, vs, scheme, *, trials=100, seed=0, weight_check=None):
    """Randomized (f_vec, B) trials of the local inequality."""
    if weight_check is None:
        weight_check = check_weight_condition(group, u, vs, system, scheme)
    reports = []
    for i in range(trials):
        rng = stream(seed, f"poincare-sweep/{i}")
        fs = [random_bump(group, rng) for _ in range(system.m)]
        ball = _random_trial_ball(rng, group)
        reports.append(
            poincare_test(
                group,
                fs,
                u,
                vs,
                system,
                ball,
                scheme,
                weight_verdict=weight_check["verdict"],
                op_id=f"poincare-sweep/{i}",
            )
        )
    return reports


def sobolev_sweep(group, system, u, vs, scheme, *, trials=50, seed=0, weight_check=None, sublaplacian=False):
    """Randomized compactly supported tuples for the global inequality."""
    if weight_check is None:
        weight_check = check_weight_condition(group, u, vs, system, scheme)
    reports = []
    for i in range(trials):
        rng = stream(seed, f"sobolev-sweep/{i}")
        fs = [random_bump(group, rng) for _ in range(system.m)]
        test = sobolev_sublaplacian_test if sublaplacian else sobolev_test
        reports.append(
            test(
                group,
                fs,
                u,
                vs,
                system,
                scheme,
                weight_verdict=weight_check["verdict"],
                op_id=f"sobolev-sweep/{i}",
            )
        )
    return reports


def repformula_sweep(group, k, m, scheme, *, pairs=10, points=50, seed=0, ball=None):
    """Pointwise representation-bound ratios over random function tuples."""
    ball = ball if ball is not None else GaugeBall(group.identity(), 1.0)
    all_records = []
    summaries = []
    for i in range(pairs):
        rng = stream(seed, f"repformula-sweep/{i}")
        fs = [
            random_bump(group, rng, center_box=0.4, radius_range=(0.8, 1.6))
            for _ in range(m)
        ]
        records, summary = representation_check(
            group, fs, ball, k, points, scheme, op_id=f"repformula-sweep/{i}"
        )
        summary["pair"] = i
        all_records.append(records)
        summaries.append(summary)
    return all_records, summaries


def leibniz_sweep(
    group, system, u, v1, v2, lam, lam1, lam2, sampler, scheme, *, configs=50, seed=0
):
    """Randomized bilinear Campanato-Morrey Leibniz trials."""
    reports = []
    for i in range(configs):
        rng = stream(seed, f"leibniz-sweep/{i}")
        f = random_bump(group, rng)
        g = random_bump(group, rng)
        reports.append(
            leibniz_test(
                group,
                f,
                g,
                u,
                v1,
                v2,
                system,
                lam,
                lam1,
                lam2,
                sampler,
                scheme,
                op_id=f"leibniz-sweep/{i}",
            )
        )
    return reports


def sweep_summary(reports):
    ratios = [r.ratio for r in reports if np.isfinite(r.ratio)]
    flags = [flag for r in reports for flag in r.flags]
    return {
        "trials": len(reports),
        "max_ratio": max(ratios) if ratios else float("nan"),
        "mean_ratio": float(np.mean(ratios)) if ratios else float("nan"),
        "finite_ratios": len(ratios),
        "flags": flags,
    }
