"""
Graph convolutional label noise cleaner for weakly supervised anomaly detection.
"""

__version__ = '0.1.0'
