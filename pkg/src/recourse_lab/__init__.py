"""
Recourse Lab: online graph algorithms that may revise earlier decisions.
"""

__version__ = "0.1.0"
