#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""The setup script for the HarmonicNS package."""

import setuptools

with open("README.md") as readme_file:
    readme = readme_file.read()

with open("requirements.txt") as req_file:
    requirements = req_file.read()

version = "0.1.0"

setuptools.setup(
    classifiers=[
        "Natural Language :: English",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    description=(
        "Harmonic vector fields on a negatively curved warped product and "
        "the nonunique Navier-Stokes solutions they generate."
    ),
    entry_points = {
              "console_scripts": [
                  "harmonicns = harmonicns.runner:main",
              ],
          },
    install_requires=requirements,
    long_description=readme + "\n",
    include_package_data=True,
    keywords="harmonicns",
    name="harmonicns",
    packages=setuptools.find_packages(exclude=["tests", "examples", "examples.*"]),
    python_requires=">=3.9",
    test_suite="tests",
    zip_safe=False,
    version=version,
)
