"""
Walking down the band hierarchy
===============================

Build the nested bands of the Fibonacci Hamiltonian at coupling 24 and
look at how they shrink and split.
"""

from sturmdos import Frequency, build_band_tree, count_words, denominators
from sturmdos.bands import gap_statistics

fib = Frequency.fibonacci()
tree = build_band_tree(fib, 24, 7)

# Two bands at order 0: one around the coupling, one around the origin.
for b in tree.roots:
    print(b.word, b.to_dict()["lo"][:8], b.to_dict()["hi"][:8])

# Counts per order match the admissible word count, and the
# type II/III bands match the convergent denominators.
q = denominators(fib, 7)
for n in range(8):
    lvl = tree.level(n)
    typed = sum(b.type != "I" for b in lvl)
    print(f"order {n}: {len(lvl):3d} bands (words {count_words(fib, n):3d}), II+III {typed:3d} = q_n {q[n]}")

# Follow one chain: every step lands inside its parent.
w = tree.level(7)[5].word
for node in tree.chain(w):
    print(f"{node.order}  {node.type:>3}  log|B| = {node.log_length:8.3f}")

# Gaps between siblings stay a fixed fraction of the parent.
print("relative gap constant:", round(gap_statistics(tree).C, 4))
