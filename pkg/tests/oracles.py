"""Independent reference implementations used only to check the package.

Everything here is deliberately naive: full dense operator matrices built
with Kronecker products, pure-Python split search with exact-rational
variances, and central finite differences. None of it shares code with the
production paths it verifies.
"""
import statistics
from math import cos, sin, sqrt

import numpy as np


def dense_1q(kind, angle=None):
    if kind == "rx":
        return np.array(
            [[cos(angle / 2), -1j * sin(angle / 2)], [-1j * sin(angle / 2), cos(angle / 2)]]
        )
    if kind == "ry":
        return np.array([[cos(angle / 2), -sin(angle / 2)], [sin(angle / 2), cos(angle / 2)]])
    if kind == "rz":
        return np.array([[np.exp(-0.5j * angle), 0], [0, np.exp(0.5j * angle)]])
    if kind == "h":
        return np.array([[1, 1], [1, -1]]) / sqrt(2)
    if kind == "x":
        return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    raise ValueError(kind)


def dense_operator(gate, num_qubits):
    """Full 2^n x 2^n matrix of one gate. Qubit 0 is the most significant bit."""
    if gate.kind == "cnot":
        dim = 1 << num_qubits
        op = np.zeros((dim, dim), dtype=complex)
        for col in range(dim):
            c_bit = (col >> (num_qubits - 1 - gate.control)) & 1
            row = col ^ ((1 << (num_qubits - 1 - gate.target)) if c_bit else 0)
            op[row, col] = 1.0
        return op
    op = np.eye(1, dtype=complex)
    for q in range(num_qubits):
        factor = dense_1q(gate.kind, gate.angle) if q == gate.target else np.eye(2)
        op = np.kron(op, factor)
    return op


def dense_apply(gates, amplitudes, num_qubits):
    """Apply a gate list to an amplitude vector through dense matrices."""
    vec = np.asarray(amplitudes, dtype=complex)
    for gate in gates:
        vec = dense_operator(gate, num_qubits) @ vec
    return vec


def dense_expectation_z(amplitudes, num_qubits, qubit):
    signs = [
        1 if ((i >> (num_qubits - 1 - qubit)) & 1) == 0 else -1
        for i in range(1 << num_qubits)
    ]
    return sum(s * abs(a) ** 2 for s, a in zip(signs, amplitudes))


def brute_force_best_split(features, targets, min_leaf=1):
    """Split search by plain enumeration with exact-rational variances."""
    rows = [list(map(float, row)) for row in features]
    ys = [float(t) for t in targets]
    n = len(ys)

    def pvar(values):
        return statistics.pvariance(values) if len(values) > 1 else 0.0

    parent = pvar(ys)
    best = None
    for f in range(len(rows[0])):
        values = sorted(set(row[f] for row in rows))
        for lo, hi in zip(values, values[1:]):
            threshold = (lo + hi) / 2
            left = [y for row, y in zip(rows, ys) if row[f] < threshold]
            right = [y for row, y in zip(rows, ys) if row[f] >= threshold]
            if len(left) < min_leaf or len(right) < min_leaf:
                continue
            decrease = parent - (len(left) * pvar(left) + len(right) * pvar(right)) / n
            if decrease <= 0:
                continue
            if best is None or decrease > best[2]:
                best = (f, threshold, decrease)
    return best


def finite_difference_gradient(fn, params, h=1e-4):
    """Central differences of a scalar function of an ndarray."""
    grad = np.zeros_like(params, dtype=float)
    it = np.nditer(params, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        plus = params.copy()
        minus = params.copy()
        plus[idx] += h
        minus[idx] -= h
        grad[idx] = (fn(plus) - fn(minus)) / (2 * h)
    return grad
