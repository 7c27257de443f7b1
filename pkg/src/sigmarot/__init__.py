"""Rotation sets of degree-one maps on the universal covering of the graph sigma."""
