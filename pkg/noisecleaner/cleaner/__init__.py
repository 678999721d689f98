"""
The graph convolutional noise cleaner: network, losses and confidence selection.
"""
