#!/usr/bin/env python3
"""Convert a benchmark .mat adjacency file into the edge-list format.

The link-prediction benchmark distributions store each graph as a sparse
adjacency matrix under the variable ``net``. Usage:

    python scripts/convert_mat.py USAir.mat data/USAir.txt
"""
import sys

import numpy as np
import scipy.io
import scipy.sparse


def convert(mat_path, out_path, var_name: str = "net") -> int:
    data = scipy.io.loadmat(mat_path)
    if var_name not in data:
        raise KeyError(f"{mat_path} has no variable {var_name!r}; "
                       f"found {[k for k in data if not k.startswith('_')]}")
    adj = scipy.sparse.csr_matrix(data[var_name])
    rows, cols = adj.nonzero()
    keep = rows < cols
    edges = np.unique(np.stack([rows[keep], cols[keep]], axis=1), axis=0)
    touched = np.unique(edges)
    if touched.size < adj.shape[0]:
        print(f"warning: {adj.shape[0] - touched.size} isolated node(s) "
              "cannot be represented in an edge list", file=sys.stderr)
    with open(out_path, "w", encoding="utf-8") as fh:
        for u, v in edges.tolist():
            fh.write(f"{u} {v}\n")
    return len(edges)


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    n = convert(sys.argv[1], sys.argv[2])
    print(f"wrote {n} edges to {sys.argv[2]}")
