"""Tour of the statevector simulator: gates, circuits, overlaps, sampling."""

import numpy as np

from qkflow.statevector import (
    Circuit,
    apply_circuit,
    cnot,
    h,
    inner_product,
    new_zero_state,
    probability_all_zeros,
    rx,
    sample_measurements,
)

# A Bell pair: Hadamard on qubit 0, then CNOT 0 -> 1.
bell = Circuit(n_qubits=2, gates=(h(0), cnot(0, 1)))
state = apply_circuit(new_zero_state(2), bell)
print("Bell amplitudes:", np.round(state.amplitudes, 6))
print("P(all zeros) =", probability_all_zeros(state))

# Measurement statistics over 2000 shots (MSB-first bitstrings).
counts = sample_measurements(state, shots=2000, seed=11)
print("counts:", counts)

# Overlap between two single-qubit rotations of the same axis.
a = apply_circuit(new_zero_state(1), Circuit(1, (rx(0, 0.7),)))
b = apply_circuit(new_zero_state(1), Circuit(1, (rx(0, 1.9),)))
overlap = inner_product(a, b)
print("overlap:", complex(np.round(overlap, 6)))
print("|overlap|^2 =", abs(overlap) ** 2, "expected:", np.cos((0.7 - 1.9) / 2) ** 2)
