import numpy as np

from topolink import Graph, write_edge_list


def small_world_graph(n=60, hops=2, n_chords=6, seed=0) -> Graph:
    """Ring lattice plus a few random chords; structured enough to learn."""
    rng = np.random.default_rng(seed)
    edges = [(i, (i + d) % n) for i in range(n) for d in range(1, hops + 1)]
    while len(edges) < n * hops + n_chords:
        u, v = rng.integers(0, n, size=2).tolist()
        if u != v:
            edges.append((min(u, v), max(u, v)))
    return Graph.from_edges(n, edges)


def write_small_world(path, **kwargs) -> str:
    g = small_world_graph(**kwargs)
    write_edge_list(g, path)
    return str(path)
