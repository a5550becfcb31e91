from .neighborhoods import EdgeSet, NeighborhoodConfig, knn_graph, radius_graph
from .res import res_sample, sampling_probability
