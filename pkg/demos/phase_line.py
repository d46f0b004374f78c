"""Success rate against m for 4-level and 1-level decoders on the same trials.

Run with ``python demos/phase_line.py``. A few dozen trials keep it quick;
raise ``TRIALS`` for smoother curves.
"""
from dataclasses import replace

from levelcs import ExperimentConfig, LevelStructure, sweep_phase_line
from levelcs.experiments import one_level

TRIALS = 20
N = 128

# s = 16 split as (3s/8, s/8, 3s/8, s/8) over four equal levels
ls = LevelStructure((32, 64, 96, 128), (6, 2, 6, 2))
m_values = tuple(range(16, 129, 16))

for alg in ("cosamp", "omp"):
    cfg = ExperimentConfig(alg, N, ls, m_values, trials=TRIALS, base_seed=1)
    four = sweep_phase_line(cfg).rows
    # same seeds, so each trial sees the same A and x; only the decoder changes
    one = sweep_phase_line(replace(cfg, solver_structure=one_level(ls))).rows
    print(f"\n{alg}: success rate")
    print("   m  4-level  1-level")
    for a, b in zip(four, one):
        print(f"{a.m:4d}  {a.success_rate:7.2f}  {b.success_rate:7.2f}")
