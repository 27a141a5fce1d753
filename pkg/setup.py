#!/usr/bin/env python3
from setuptools import find_packages, setup

setup(
    name="metric_causal",
    version="0.1.0",
    url="unknown",
    description="Average and median treatment effects for outcomes on Riemannian manifolds",
    install_requires=[
        "fvcore",
        "yacs>=0.1.6",
        "pyyaml>=5.1",
        "numpy>=1.17",
        "scipy>=1.4",
        "scikit-learn>=1.2",
        "pandas",
        "simplejson",
        "tqdm",
        "psutil",
    ],
    extras_require={"test": ["pytest"]},
    packages=find_packages(exclude=("configs", "tests")),
)
