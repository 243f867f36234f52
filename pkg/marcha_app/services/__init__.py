"""
Services module - Numerical layer.
Services hold the dynamics, constraint, control and simulation logic; commands only orchestrate.
"""
