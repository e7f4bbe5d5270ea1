#!/usr/bin/env python3
"""
Setup script for the Recourse Lab package.
"""

from setuptools import find_packages, setup

setup(
    name="recourse-lab",
    version="0.1.0",
    description="Online graph algorithms with recourse, exact oracles and bound checks",
    author="Recourse Lab Team",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    package_data={"recourse_lab": ["data/*.yaml"]},
    include_package_data=True,
    python_requires=">=3.9",
    install_requires=[
        "click>=8.0.0",
        "rich>=10.0.0",
        "pydantic>=2.0.0",
        "python-dotenv>=0.19.0",
        "pyyaml>=6.0",
        "tqdm>=4.64.0",
        "networkx>=3.0",
    ],
    entry_points={
        "console_scripts": [
            "recourse-lab=recourse_lab.__main__:main",
        ],
    },
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Environment :: Console",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
