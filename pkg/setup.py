#!/usr/bin/env python3
"""
Setup script for vecfont.
This file allows installing the application as a package.
"""

from setuptools import setup, find_packages

# List of dependencies
with open("requirements.txt", "r") as f:
    requirements = [line.strip() for line in f if line.strip() and not line.startswith("#")]

setup(
    name='vecfont',
    version='1.0.0',
    description='Style transfer between vector glyphs with a hierarchical Transformer',
    author='vecfont Team',
    author_email='example@example.com',
    packages=find_packages(exclude=['tests', 'tests.*', 'examples', 'examples.*']),
    entry_points={
        'console_scripts': [
            'vecfont=src.main:main',
        ],
    },
    package_dir={'': '.'},
    python_requires='>=3.8',
    install_requires=requirements,
    tests_require=[
        'pytest',
        'pytest-cov',
    ],
)
