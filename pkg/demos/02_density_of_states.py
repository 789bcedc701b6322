"""
Density of states two ways
==========================

The DOS mass of a band can be counted combinatorially (typed descendants)
or spectrally (periodic eigenvalues that fall inside it).  They agree
exactly.
"""

from sturmdos import Frequency, BandTree
from sturmdos.dos import dos_approx, dos_spectral, periodic_spectrum

silver = Frequency.constant(2)
tree = BandTree(silver, 24)

n, l = 3, 7
comb = dos_approx(silver, n, l)
spec = dos_spectral(tree, l, n)
print("exact agreement:", comb.masses == spec.masses)

for level, word, mass in list(comb.rows())[-6:]:
    print(f"{word:40s} {mass}")

# Each order-n level sums to one as a rational number.
print([str(comb.level_sum(k)) for k in range(n + 1)])

# The periodic approximant itself.
vals = periodic_spectrum(silver, 24, 4)
print(len(vals), "eigenvalues, lowest", vals[:3].round(4))
