"""From persistence diagrams to fixed-size feature vectors.

Run: python demos/03_persistence_images.py
"""
from pathlib import Path

from topolink import fit_pi_grid, link_features, persistence_image
from topolink.vectorize import subgraph_diagram_pair

import sys
sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))
from conftest import small_world_graph  # reuse the synthetic generator

g = small_world_graph(n=40, n_chords=6, seed=7)
print(f"synthetic graph: {g.num_nodes} nodes, {g.num_edges} edges")

# Diagrams for one candidate pair, with and without the link.
dgm_minus, dgm_plus = subgraph_diagram_pair(g, 3, 11, 2, 2, "degree_drnl",
                                            "target", 0, seed=0)
print(f"without link: {dgm_minus.num_pairs} dim-0 classes, cap {dgm_minus.cap:.2f}")
print(f"   with link: {dgm_plus.num_pairs} dim-0 classes, cap {dgm_plus.cap:.2f}")

# Grids are fitted on training diagrams only, then frozen. The image is
# the exact integral of the weighted Gaussian surface over each cell.
cfg = fit_pi_grid([dgm_minus, dgm_plus], resolution=7, max_dim=0)
img = persistence_image(dgm_minus, 0, cfg).reshape(7, 7)
print("\nwithout-link image (rows = birth axis, cols = persistence):")
for row in img:
    print("  " + " ".join(f"{x:5.2f}" for x in row))

# The per-link feature concatenates the without/with-link image stacks;
# for an asymmetric angle the swapped orientation is averaged in, which
# is what makes features symmetric in the endpoints.
vec = link_features(g, 3, 11, (2, 1), cfg, max_dim=0)
print(f"\nfeature vector length: {vec.shape[0]} = 2 * (0+1) * 7^2")
print(f"nonzero entries: {(vec > 0).sum()}, total mass {vec.sum():.3f}")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not installed; skipping the png")
else:
    out = Path(__file__).parent / "out"
    out.mkdir(exist_ok=True)
    fig, axes = plt.subplots(1, 2, figsize=(7, 3))
    half = vec.shape[0] // 2
    for ax, block, title in [(axes[0], vec[:half], "without link"),
                             (axes[1], vec[half:], "with link")]:
        ax.imshow(block.reshape(7, 7), origin="lower", cmap="viridis")
        ax.set_title(title)
        ax.set_xlabel("persistence cell")
        ax.set_ylabel("birth cell")
    fig.tight_layout()
    fig.savefig(out / "persistence_images.png", dpi=120)
    print(f"wrote {out / 'persistence_images.png'}")
