"""Mesh hierarchies, dual geodesic/Euclidean graph convolutions, and a
semantic-segmentation training pipeline for triangle meshes."""

__version__ = "0.1.0"
