"""Pipeline stages: elliptic functions, geometry, Poncelet polygons, braids, diagrams, lift and export."""
