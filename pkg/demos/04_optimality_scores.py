"""Distance optimality: observed, random and minimum baselines.

The score (random - observed) / (random - minimum) is 1 when a sentence
fully minimizes its total dependency distance, near 0 for random-like
orders, and negative when distances exceed the random expectation.  Three-
word sentences bottom out at exactly -0.5.
"""

from depdist import DepTree, average_omega, omega

cases = {
    "fully minimized 3-word": DepTree((2, 0, 2)),       # distances {1, 1}
    "anti-minimized 3-word": DepTree((0, 3, 1)),        # distances {1, 2}
    "chain of 6": DepTree((0, 1, 2, 3, 4, 5)),
    "hub of 6": DepTree((0, 1, 1, 1, 1, 1)),
    "8-word example sentence": DepTree((2, 0, 2, 5, 2, 8, 8, 5)),
}

for label, tree in cases.items():
    result = omega(tree)
    print(f"{label}: D={result.distance_sum}, "
          f"random={result.random_baseline:.3f}, min={result.minimum}, "
          f"score={result.omega:+.3f}")

print("\nper-length averages over a mixed mini-corpus:")
corpus = [
    DepTree((2, 0, 2)), DepTree((0, 3, 1)), DepTree((0, 1, 2)),
    DepTree((0, 1, 1, 3)), DepTree((2, 0, 2, 3)),
    DepTree((0, 1, 2, 3, 4)), DepTree((3, 3, 0, 3, 4)),
]
for n, stats in average_omega(corpus).items():
    print(f"  n={n}: mean score {stats.mean_omega:+.3f} "
          f"over {stats.count} sentences (skipped {stats.skipped})")
