"""
Local dimensions along sampled chains
=====================================

For Fibonacci the DOS is exact-dimensional, so ratios log mass / log length
along random chains should bunch together as depth grows.  At large
coupling d * log(lambda) creeps toward its closed-form limit.
"""

import math

from sturmdos import BandTree, Frequency
from sturmdos.dos import dimension_estimate, fibonacci_constant

tree = BandTree(Frequency.fibonacci(), 24)
for depth in (8, 12, 16):
    est = dimension_estimate(tree, depth, chains=32)
    print(f"depth {depth:2d}: median d = {est['estimate']:.4f}, spread {est['spread']:.4f}")

const = float(fibonacci_constant())
for lam in (50, 200):
    est = dimension_estimate(BandTree(Frequency.fibonacci(), lam), 20, chains=16)
    print(f"lambda {lam}: d*log(lambda) = {est['estimate'] * math.log(lam):.4f} (limit {const:.4f})")
