"""Smoke test for the qge extension module.

Build first:  cd crates/py && maturin develop --release
Run:          python python/smoke_test.py
"""
import cmath
import json
import math

import numpy as np

import qge


def close(a, b, tol=1e-12):
    assert abs(a - b) <= tol, (a, b)


# star graph at the half-mixing point
x = math.atan(2.0)
g = qge.MetricGraph.star4(1.0, 1.0, 1.0)
assert g.validate() == []
ch = g.channel(x)
close(abs(ch.r) ** 2, 0.5)
close(abs(ch.t) ** 2, 0.5)
assert ch.unitarity_residual() <= 1e-10

s = np.array(g.smatrix(x))
assert s.shape == (2, 2)
close(np.abs(s.conj().T @ s - np.eye(2)).max(), 0.0, 1e-10)

# solver agrees with the closed form
ana = qge.star4_analytic(0.7, 1.3, 0.4, 2.1)
num = qge.MetricGraph.star4(1.3, 0.4, 2.1).channel(0.7)
close(abs(ana.r - num.r), 0.0, 1e-10)
close(abs(ana.t - num.t), 0.0, 1e-10)

# json round trip, and bad input raises
g2 = qge.MetricGraph.from_json(g.to_json())
assert json.loads(g2.to_json()) == json.loads(g.to_json())
try:
    qge.MetricGraph.from_json('{"version": 2}')
except ValueError:
    pass
else:
    raise AssertionError("version 2 accepted")

# channel-phase pair at pi: maximally entangled
a = qge.rt_channel(x)
pair = qge.ControlledPair.channel_phase(a, a, math.pi)
rep = pair.analyze()
close(rep.entropy, 1.0)
close(rep.lambda_plus, 0.5)
close(np.trace(np.array(pair.reduce_a())).real, 1.0)

# p_A = 1/2, p_B = 1/4
ra = qge.ChannelSMatrix(math.sqrt(0.5), 1j * math.sqrt(0.5))
rb = qge.ChannelSMatrix(math.sqrt(0.75), 1j * math.sqrt(0.25))
lp, lm = qge.ControlledPair.channel_phase(ra, rb, math.pi).lambda_pm()
close(lp, 0.75)
close(lm, 0.25)
close(qge.entropy(lp, lm), 0.8112781244591328, 1e-14)

# entropy vs Schmidt decomposition
psi = np.array(pair.joint_state()).reshape(2, 2)
sv = np.linalg.svd(psi, compute_uv=False) ** 2
close(-sum(p * math.log2(p) for p in sv if p > 0), rep.entropy, 1e-10)

# edge phase condition
for n in (0, 1):
    phi = qge.solve_phi(math.pi / 4, n)
    assert qge.tan_product_residual(math.pi / 4, phi) <= 1e-9

# gates
for name in ("identity", "pauli-z", "hadamard"):
    *_, dev, ok = qge.verify_gate(name)
    assert ok, (name, dev)
*_, ok = qge.verify_gate("pauli-x", alpha=0.3, n_beta=2)
assert ok
*_, ok = qge.verify_gate("hadamard", plus=False)
assert not ok

# phase form reproduces a Pauli-Z up to global phase
m = np.array(qge.star4_phase_form(math.pi / 2, 0.0, math.pi / 2))
close(np.abs(m / m[0, 0] - np.diag([1, -1])).max(), 0.0, 1e-12)

# surface
rows = qge.entropy_surface("channel-phase", [(0, 1, 11), (0, 1, 11), (math.pi, math.pi, 1)])
assert len(rows) == 121
best = max(rows, key=lambda r: r[4])
close(best[0], 0.5)
close(best[1], 0.5)
close(best[4], 1.0, 1e-12)

close(qge.expected_transmission_b(0.5, 1j * math.sqrt(0.25), cmath.exp(1j) * 0.5j), 0.25)

print("python smoke test ok")
