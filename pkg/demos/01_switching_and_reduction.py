"""Switching functions and the fast-switching reduction.

Run with ``python demos/01_switching_and_reduction.py``; SVG figures land in
``demos/output/``.
"""
from pathlib import Path

import numpy as np

from goorgrow.export import svg_line_plot
from goorgrow.reduced import effective_diffusion, effective_rate, equilibrium_fractions, fkpp_theta, small_density_slope
from goorgrow.switching import FIGURE_PAIRS, validate_pair

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# %% The four switching pairs used for the profile figures
rho = np.linspace(0.0, 1.0, 201)
for name, pair in FIGURE_PAIRS.items():
    report = validate_pair(pair)
    print(f"{name}: Gamma(0) = {pair.rates_at_zero()}, degenerate = {report.degenerate}")

# %% Constant rates: the reduced model is FKPP with D = theta, r = (1 - theta)(1 - rho)
pair = FIGURE_PAIRS["fig1a"]
theta = fkpp_theta(pair)
print(f"theta = {theta:.4f}; D(0.3) = {effective_diffusion(pair, 0.3):.4f}; r(0.3) = {effective_rate(pair, 0.3):.4f}")

# %% Density-dependent rates give nonlinear, possibly degenerate, diffusion
series_d, series_r = [], []
for name, pair in FIGURE_PAIRS.items():
    series_d.append((name, rho, effective_diffusion(pair, rho)))
    series_r.append((name, rho, effective_rate(pair, rho)))
svg_line_plot(series_d, OUT / "effective_diffusion.svg", "rho", "D(rho)", "reduced diffusion")
svg_line_plot(series_r, OUT / "effective_rate.svg", "rho", "r(rho)", "reduced growth rate")

# With Gamma2(0) = 0 the diffusion vanishes linearly at zero density
print(f"fig1b: D'(0) = {small_density_slope(FIGURE_PAIRS['fig1b']):.3f}")

# %% How the population splits between the two states at switching balance
r1, r2 = equilibrium_fractions(FIGURE_PAIRS["fig1d"], rho)
svg_line_plot([("rho1", rho, r1), ("rho2", rho, r2)], OUT / "balance_fractions.svg", "rho", "density",
              "fig1d balance split")
print(f"wrote figures to {OUT}")
