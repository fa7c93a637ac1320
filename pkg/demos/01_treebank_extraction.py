"""From CoNLL-U text to dependency trees and distance samples.

The toy corpus below encodes an 8-word sentence whose dependency edges span
distances {1, 1, 1, 1, 2, 3, 3}, plus a couple of short sentences, one
multiword-token range line, and one empty node (both of which the parser
drops before measuring anything).
"""

from depdist import build_samples, distances, parse_conllu

CONLLU = """\
# sent_id = demo-1
# text = John gave Bill the painting that Mary hated
1	John	_	_	_	_	2	_	_	_
2	gave	_	_	_	_	0	_	_	_
3	Bill	_	_	_	_	2	_	_	_
4	the	_	_	_	_	5	_	_	_
5	painting	_	_	_	_	2	_	_	_
6	that	_	_	_	_	8	_	_	_
7	Mary	_	_	_	_	8	_	_	_
8	hated	_	_	_	_	5	_	_	_

# sent_id = demo-2 (with a multiword range line, skipped)
1-2	couldn't	_	_	_	_	_	_	_	_
1	could	_	_	_	_	0	_	_	_
2	not	_	_	_	_	1	_	_	_
3	stay	_	_	_	_	1	_	_	_

# sent_id = demo-3 (with an empty node, skipped)
1	short	_	_	_	_	2	_	_	_
1.1	ghost	_	_	_	_	_	_	_	_
2	sentence	_	_	_	_	0	_	_	_
"""

trees = parse_conllu(CONLLU)
print(f"parsed {len(trees)} sentences")
for i, tree in enumerate(trees, 1):
    print(f"  sentence {i}: n={tree.n}, heads={tree.heads}, "
          f"distances={sorted(distances(tree))}")

sset = build_samples(trees, language="Demo", collection="TOY")
pooled = sset.pooled
print("\npooled sample (all sentence lengths together):")
print(f"  N = {pooled.total} dependencies, "
      f"mean d = {pooled.mean_d:.3f}, max d = {pooled.max_d}")
print(f"  frequency table: {dict(pooled.freq)}")

print("\nper-length samples:")
for n, sample in sset.by_length.items():
    print(f"  n={n}: {dict(sample.freq)}")

print("\nsentence-length proportions (feeds the length-mixture null):")
for n, p in sset.lengths.items():
    print(f"  p(n={n}) = {p:.3f}")
