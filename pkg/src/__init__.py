"""PrivGNN Workbench

Private release of GNN knowledge from a private graph to a public one,
with Rényi-DP accounting, PATE comparisons and desk-scale experiments.
"""

__version__ = "0.1.0"
