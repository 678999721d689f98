"""
The classifier <-> cleaner alternation.
"""
