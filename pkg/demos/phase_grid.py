"""Phase-transition heat map over (s, m) written as SVG.

The signal puts s/2 nonzeros in levels one and three and none elsewhere.
Sparsities where s/2 exceeds a level width are skipped and drawn hatched.
"""
import sys

from levelcs import ExperimentConfig, LevelStructure, sweep_phase_grid
from levelcs.experiments import STRUCTURE_RULES
from levelcs.report import emit_csv, emit_svg_heatmap

out = sys.argv[1] if len(sys.argv) > 1 else "phase_grid.svg"
N = 64
cfg = ExperimentConfig("cosamp", N, LevelStructure((N,), (1,)),
                       m_values=tuple(range(8, 65, 8)), trials=10, base_seed=3)
grid = sweep_phase_grid(cfg, list(range(4, 41, 4)), STRUCTURE_RULES["alternating"])

for s, row in zip(grid.s_values, grid.rates):
    print(f"s={s:3d} " + " ".join("  -- " if r != r else f"{r:4.2f}" for r in row))

emit_svg_heatmap(grid, out, title="CoSaMPL, s/2 in levels 1 and 3")
emit_csv(grid.sweep, out.rsplit(".", 1)[0] + ".csv")
print("wrote", out)
