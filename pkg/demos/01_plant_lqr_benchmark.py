"""
Building the pursuer plant, its LQR feedback, and the delayed system
=====================================================================

Walks the synthesis pipeline end to end: point-mass plant in state space,
optimal gain from the Riccati equation, and the split of that gain over the
two sensing-delay channels.  Finishes by loading the built-in "fig9"
benchmark instance used throughout the stability studies.
"""
import numpy as np

from delaychase import (
    LqrWeights,
    PlantParams,
    assemble_delay_system,
    build_plant,
    fig9_benchmark,
    lqr_gain,
    solve_care,
    zero_delay_matrix,
)

np.set_printoptions(precision=4, suppress=True)

# A 1 kg pursuer with light viscous damping.  State ordering is
# [x, vx, y, vy]; the two axes are decoupled 2x2 blocks.
plant = build_plant(PlantParams(m=1.0, c=1.0))
print("plant A =\n", plant.a)
print("plant B =\n", plant.b)
print("open-loop eigenvalues:", np.linalg.eigvals(plant.a).real)

# LQR with identity weights: solve the Riccati equation, then form the gain.
weights = LqrWeights.identity()
p = solve_care(plant.a, plant.b, weights)
k = lqr_gain(plant.a, plant.b, weights)
print("\nRiccati solution P =\n", p)
print("gain k =\n", k)
print("closed-loop eigenvalues:", np.sort(np.linalg.eigvals(plant.a - plant.b @ k)))

# Split the gain over the delay channels: position feedback arrives tau1
# late, velocity feedback tau2 late.
sys = assemble_delay_system(plant, k, tau1=0.3, tau2=0.5)
print("\ndelayed-feedback B1 (position gains) =\n", sys.b1)
print("delayed-feedback B2 (velocity gains) =\n", sys.b2)
print("zero-delay reduction A + B1 + B2 has eigenvalues:",
      np.sort(np.linalg.eigvals(zero_delay_matrix(sys))))

# The shipped benchmark: an opaque numeric error dynamics whose A matrix is
# not derivable from any (m, c) pair; its feedback rows mix all four error
# components per axis.
bench = fig9_benchmark(0.8, 0.8)
print("\nfig9 benchmark A row 2:", bench.a[1])
print("fig9 zero-delay eigenvalues:",
      np.sort_complex(np.linalg.eigvals(zero_delay_matrix(bench))))
