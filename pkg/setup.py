#!/usr/bin/env python
from setuptools import find_packages, setup


def is_requirement(line):
    """
    Return True if the requirement line is a package requirement;
    that is, it is not blank, a comment, or editable.
    """
    # Remove whitespace at the start/end of the line
    line = line.strip()

    # Skip blank lines, comments, and editable installs
    return not (
        line == '' or
        line.startswith('-r') or
        line.startswith('#') or
        line.startswith('-e') or
        line.startswith('git+')
    )


def load_requirements(*requirements_paths):
    """
    Load all requirements from the specified requirements files.
    Returns a list of requirement strings.
    """
    requirements = set()
    for path in requirements_paths:
        with open(path) as requirements_file:
            requirements.update(
                line.strip() for line in requirements_file.readlines()
                if is_requirement(line)
            )
    return sorted(requirements)


setup(
    name='noisecleaner',
    version='0.1.0',
    description='Graph-convolutional label-noise cleaner for weakly supervised video anomaly detection',
    license='AGPL',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Framework :: Django :: 3.2',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU Affero General Public License v3',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
    ],
    packages=find_packages(include=['noisecleaner*'], exclude=['*.test', '*.tests']),
    include_package_data=True,
    python_requires='>=3.8',
    install_requires=load_requirements('requirements/base.txt', 'requirements/django.txt'),
    tests_require=load_requirements('requirements/test.txt'),
)
