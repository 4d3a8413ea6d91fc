"""Link prediction on attribute-free graphs via persistent homology.

The pipeline: extract (k, l)-angle-hop enclosing subgraphs around each
candidate link, label nodes by double-radius distance (optionally with a
degree correction), turn labels into an edge-weighted flag filtration,
compute persistence diagrams, rasterize them into persistence images,
and classify the concatenated without-link/with-link image vectors with
an MLP; a softmax mixture combines all angle types.
"""

from .graph import Graph, bounded_bfs, load_edge_list, write_edge_list
from .splits import (LinkSplit, load_split, sample_negative_links, save_split,
                     split_links)
from .subgraphs import (EnclosingSubgraph, add_target_link, angle_menu,
                        extract_angle_hop)
from .labeling import EdgeWeights, NodeLabeling, degree_drnl, drnl, edge_weights
from .persistence import (Filtration, PersistenceDiagram, build_flag_filtration,
                          persistence_dim0, persistence_reduce,
                          write_diagram_csv)
from .vectorize import (PIConfig, PIGrid, feature_length, fit_pi_grid,
                        link_features, persistence_image)
from .model import (MLPParams, MultiAngleModel, TrainConfig, auc, mlp_forward,
                    train_mlp, train_multi_angle)
from .experiment import (ExperimentConfig, ExperimentReport, analyze_projection,
                         export_features, run_experiment, run_seed, score_links)

__all__ = [
    "Graph", "bounded_bfs", "load_edge_list", "write_edge_list",
    "LinkSplit", "split_links", "sample_negative_links", "save_split", "load_split",
    "EnclosingSubgraph", "extract_angle_hop", "add_target_link", "angle_menu",
    "NodeLabeling", "EdgeWeights", "drnl", "degree_drnl", "edge_weights",
    "Filtration", "PersistenceDiagram", "build_flag_filtration",
    "persistence_dim0", "persistence_reduce", "write_diagram_csv",
    "PIConfig", "PIGrid", "fit_pi_grid", "persistence_image", "link_features",
    "feature_length",
    "MLPParams", "MultiAngleModel", "TrainConfig", "mlp_forward", "auc",
    "train_mlp", "train_multi_angle",
    "ExperimentConfig", "ExperimentReport", "run_experiment", "run_seed",
    "export_features", "analyze_projection", "score_links",
]

__version__ = "0.1.0"
