"""
Core module - Constants, exceptions, configuration loading and validators.
"""
