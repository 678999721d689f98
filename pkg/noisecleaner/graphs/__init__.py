"""
Feature-similarity and temporal-consistency graphs over the snippets of one video.
"""
