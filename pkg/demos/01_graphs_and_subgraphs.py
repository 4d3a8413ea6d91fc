"""Loading graphs and slicing out angle-hop enclosing subgraphs.

Run: python demos/01_graphs_and_subgraphs.py
"""
import io

from topolink import (add_target_link, angle_menu, bounded_bfs,
                      extract_angle_hop, load_edge_list)

# A small collaboration-style graph. Node tokens can be arbitrary strings;
# they are mapped to dense integer ids in first-appearance order.
EDGES = """\
ada bob
bob cam
cam dee
dee ada
ada cam
dee eli
eli fay
fay gus
gus dee
bob fay
"""

g = load_edge_list(io.StringIO(EDGES))
print(f"loaded {g.num_nodes} nodes, {g.num_edges} edges")
print("hop distances from node 0:", bounded_bfs(g, 0))

# The unit of work for link prediction is the enclosing subgraph of a
# candidate pair. The (k, l) "angle" takes k hops around one endpoint and
# l hops around the other; (k, k) recovers the classic k-hop subgraph.
u, v = 0, 3  # ada, dee
for k, l in [(1, 0), (1, 1), (2, 1)]:
    sub = extract_angle_hop(g, u, v, k, l)
    print(f"angle ({k},{l}): {sub.num_nodes} nodes, "
          f"{sub.local_graph.num_edges} edges, target={sub.target_local}")

# The target edge itself is always stripped before extraction, even when
# (u, v) is a real edge, so a positive link never sees its own label.
sub = extract_angle_hop(g, u, v, 1, 1)
print("edge (u,v) inside the subgraph?",
      sub.local_graph.has_edge(*sub.target_local))

# Connecting the link back produces the "with-link" twin used for the
# feature contrast; everything else is unchanged.
linked = add_target_link(sub)
print("after add_target_link:", linked.local_graph.num_edges, "edges")

# The full menu of angles a max hop H = 3 run will consume:
print("angle menu for H=3:", angle_menu(3))
