#!/usr/bin/env python3
"""
Setup script for the PT-Symmetric Dimer Simulator
"""

from setuptools import setup, find_packages

# Read the README file
with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

# Runtime requirements stop at the development section of requirements.txt
requirements = []
with open("requirements.txt", "r", encoding="utf-8") as fh:
    for line in fh:
        line = line.strip()
        if line.startswith("# Development"):
            break
        if line and not line.startswith("#"):
            requirements.append(line)

setup(
    name="pt-dimer-simulator",
    version="1.0.0",
    author="PT Dimer Simulator Team",
    description="Many-particle dynamics of a Bose-Einstein condensate dimer with balanced gain and loss",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(where="src") + ["config", "scripts"],
    package_dir={"": "src", "config": "config", "scripts": "scripts"},
    classifiers=[
        "Development Status :: 4 - Beta",
        "Intended Audience :: Science/Research",
        "Topic :: Scientific/Engineering :: Physics",
        "License :: OSI Approved :: MIT License",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Operating System :: OS Independent",
    ],
    python_requires=">=3.8",
    install_requires=requirements,
    extras_require={
        "dev": [
            "pytest>=7.2.0",
            "pytest-cov>=4.0.0",
            "black>=22.10.0",
            "flake8>=5.0.4",
            "mypy>=0.991",
        ],
        "docs": [
            "sphinx>=5.3.0",
            "sphinx-rtd-theme>=1.1.1",
        ],
    },
    entry_points={
        "console_scripts": [
            "ptdimer-simulate=scripts.simulate:main",
            "ptdimer-health=scripts.health_check:main",
        ],
    },
    include_package_data=True,
    package_data={
        "config": ["*.yaml", "figures/*.cfg"],
    },
)
