"""
Feature files and tensor containers.
"""
