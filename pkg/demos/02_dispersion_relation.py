"""Linear spreading speeds from the dispersion relation c(sigma)."""
from pathlib import Path

import numpy as np

from goorgrow.export import svg_line_plot
from goorgrow.waves import cmin_explicit, dispersion_curve, leading_edge, minimize_dispersion, positivity_threshold

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

# %% c(sigma) for a few rate pairs; every curve passes through (1, 1)
sigma = np.geomspace(0.2, 5.0, 300)
pairs = [(0.5, 1.0), (1.0, 0.5), (0.7, 0.7), (0.5, 0.0)]
series = [(f"g1={g1}, g2={g2}", sigma, dispersion_curve(g1, g2, sigma)[1]) for g1, g2 in pairs]
svg_line_plot(series, OUT / "dispersion.svg", "sigma", "c", "dispersion relation")

for g1, g2 in pairs:
    m = minimize_dispersion(g1, g2)
    print(f"gamma = ({g1}, {g2}): sigma* = {m.sigma_star:.5f}, c_min = {m.c_min:.5f} [{m.method}]")

# %% On the axes the minimum has a closed form; the numeric search agrees
for g1, g2 in [(3.0, 0.0), (0.0, 0.36), (0.0, 1.5)]:
    exact = cmin_explicit(g1, g2).c_min
    numeric = minimize_dispersion(g1, g2, method="numeric").c_min
    print(f"({g1}, {g2}): closed form {exact:.10f}, numeric {numeric:.10f}")

# %% The minimum speed over the rate plane never exceeds 1
g = np.linspace(0.0, 2.0, 21)
table = np.array([[minimize_dispersion(a, b).c_min for b in g] for a in g])
print(f"max c_min over [0, 2]^2: {table.max():.12f}")

# %% When Gamma2(0) = 0, a positive leading edge needs c > 1/sqrt(1 + gamma1)
for g1 in (0.1, 0.5, 2.0):
    edge = leading_edge(1.0, g1)
    print(f"gamma1 = {g1}: flip at {positivity_threshold(g1):.12f}, 1/sqrt(1+g1) = {1 / np.sqrt(1 + g1):.12f}, "
          f"lambda(1) = {edge.lam:.4f}")
