"""
Snippet classifiers that produce the noisy labels the cleaner corrects.
"""
