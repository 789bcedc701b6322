"""
Alternating 1-blocks and 2-blocks
=================================

Frequencies 1^t1 2^tau1 1^t2 2^tau2 ... are where upper and lower local
dimensions are expected to separate.  At desk-scale depth the effect is
small; this script shows the checkpoint statistics and the feasibility
report for a short schedule.
"""

from sturmdos.dos import build_alternating_frequency, oscillation_diagnostic

freq, rows = build_alternating_frequency([(4, 4), (6, 6)], lam=60, chains=8)
print(freq.quotients(20))
for r in rows:
    d = r.to_dict()
    print(f"block {r.n}: T^_prev={r.T_hat_prev} T={r.T} T^={r.T_hat} "
          f"q-condition ok={d['q_ok']} slack={d['q_slack']:.3f}")

rep = oscillation_diagnostic(freq, 60, 20, chains=16, baselines=True)
print("checkpoints", rep.checkpoints)
print(f"mean d at T: {rep.lower['mean']:.4f}  at T^: {rep.upper['mean']:.4f}  "
      f"delta {rep.delta:+.4f} +- {rep.se:.4f}")
print(f"per-block increments: ones {rep.block['ones']['mean']:.4f}  twos {rep.block['twos']['mean']:.4f}")
print("constant-type baselines:", {k: round(v, 4) for k, v in rep.baselines.items()})
