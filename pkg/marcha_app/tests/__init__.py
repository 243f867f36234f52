"""
Test suite for the gait application.
"""
