"""Superradiant thresholds under alternative readings of the printed formulas.

Two choices are compared: the atomic frequency referenced to omega_r or to
the cavity frequency omega, and the superradiant cross coupling built from
zeta or from the bare lambda.  Used when a reproduced threshold misses its
target, to show which choice moves it.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import optimize

from .model import GdmParams, ModelError, critical_coupling, mean_fields, superradiant_coeffs
from .steering import THRESHOLD, Direction, steering_closed_form
from .supermode import Branch, build_superradiant_problem, diagonalize


def _pair(params: GdmParams, lam: float, branch: Branch, reference: str, coupling: str):
    p = params.with_lambda(lam)
    coeffs = superradiant_coeffs(p, mean_fields(p, reference))
    problem = build_superradiant_problem(p, coeffs, coupling)
    return steering_closed_form(diagonalize(problem, branch))


def superradiant_crossings(params: GdmParams, branch: Branch, which: Direction, lambda_max: float,
                           reference: str = "recoil", coupling: str = "zeta",
                           points: int = 400) -> list[float]:
    lam_c = critical_coupling(params, reference)
    lo = lam_c * 1.005
    if lo >= lambda_max:
        return []
    grid = np.linspace(lo, lambda_max, points)
    values = []
    for lam in grid:
        try:
            values.append(_pair(params, float(lam), branch, reference, coupling).value(which) - THRESHOLD)
        except (ModelError, ArithmeticError):
            values.append(math.nan)
    values = np.array(values)
    roots = []
    for k in range(len(grid) - 1):
        a, b = values[k], values[k + 1]
        if np.isfinite(a) and np.isfinite(b) and a * b < 0:
            roots.append(optimize.bisect(
                lambda x: _pair(params, x, branch, reference, coupling).value(which) - THRESHOLD,
                grid[k], grid[k + 1], xtol=1e-6))
    return roots


def reconciliation_report(params: GdmParams, branch: Branch, which: Direction,
                          target: float, lambda_max: float = 25.0) -> str:
    lines = [f"threshold reconciliation for E_{which.value}, branch {branch.name}, target {target}"]
    for reference, coupling in itertools.product(("recoil", "cavity"), ("zeta", "lambda")):
        try:
            lam_c = critical_coupling(params, reference)
            roots = superradiant_crossings(params, branch, which, lambda_max, reference, coupling)
            found = ", ".join(f"{r:.4f}" for r in roots) or "none"
            lines.append(f"  omega2 ref={reference:6s} cross={coupling:6s} lambda_c={lam_c:9.4f} "
                         f"crossings: {found}")
        except ModelError as exc:
            lines.append(f"  omega2 ref={reference:6s} cross={coupling:6s} failed: {exc}")
    return "\n".join(lines)
