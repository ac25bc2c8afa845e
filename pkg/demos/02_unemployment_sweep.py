"""
Unemployment across productivity levels
=======================================

Sweeps productivity from 0.97 to 1.03 and plots steady-state
unemployment for each economy. The economy whose hiring cost eats most of
the surplus moves far more than the others.
"""

import numpy as np

from dmp_volatility import build_economies, sweep_y
from dmp_volatility.decomposition import default_y_grid

grid = default_y_grid()
economies = build_economies()
paths = {name: np.array([p.u for p in sweep_y(e.cal, e.tech, grid)]) for name, e in economies.items()}

for name, u in paths.items():
    print(f"{name:9s} u(0.97)={u[0]:.4f} u(1.00)={u[30]:.4f} u(1.03)={u[-1]:.4f}")

###############################################################################
# Plot only when matplotlib is around; the numbers above are the point.

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, u in paths.items():
        ax.plot(grid, 100 * u, label=name)
    ax.set_xlabel("productivity y")
    ax.set_ylabel("unemployment (%)")
    ax.legend()
    fig.tight_layout()
    fig.savefig("ur_dynamics.png", dpi=120)
    print("saved ur_dynamics.png")
