"""Lie-bracket word catalogs, Newton polytopes and Carnot-Caratheodory ball numerics
for multilinear Radon-like transforms built from polynomial vector fields."""

__version__ = "0.1.0"
