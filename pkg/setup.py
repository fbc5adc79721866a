#!/usr/bin/env python3
"""
DELTA Graph Active Selection - Setup Configuration

Legacy setuptools entry point; pyproject.toml holds the canonical metadata.
"""

import sys
from pathlib import Path

from setuptools import find_packages, setup

if sys.version_info < (3, 9):
    print("Error: This package requires Python 3.9 or higher.")
    print(f"You are using Python {sys.version}")
    sys.exit(1)

this_directory = Path(__file__).parent


def read_long_description():
    """Framework guide as the long description, when it ships with the sources."""
    guide = this_directory / "docs" / "FRAMEWORK.md"
    return guide.read_text(encoding="utf-8") if guide.exists() else ""


def read_requirements():
    """Read requirements from requirements.txt, skipping comments and test-only tools."""
    requirements_path = this_directory / "requirements.txt"
    if not requirements_path.exists():
        return []
    requirements = []
    with open(requirements_path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.split("#")[0].strip()
            if line and not line.startswith(("pytest", "hypothesis")):
                requirements.append(line)
    return requirements


def get_version():
    """Extract version from src/__init__.py."""
    version_file = this_directory / "src" / "__init__.py"
    if version_file.exists():
        for line in version_file.read_text(encoding="utf-8").splitlines():
            if line.strip().startswith("__version__"):
                return line.split("=")[1].strip().strip('"').strip("'")
    return "1.0.0"


setup(
    name="delta-graph-active-selection",
    version=get_version(),
    author="DELTA Selection Team",
    author_email="contact@example.com",
    description="Active node selection for graph domain adaptation with dual edge/path subnetworks",
    long_description=read_long_description(),
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests*", "docs*"]),
    py_modules=["main_controller"],
    include_package_data=True,
    zip_safe=False,
    install_requires=read_requirements(),
    extras_require={
        "test": [
            "pytest>=7.0.0",
            "pytest-cov>=4.0.0",
            "hypothesis>=6.61.0",
        ],
    },
    license="MIT",
    python_requires=">=3.9",
    entry_points={
        "console_scripts": [
            "delta-select=main_controller:main",
        ],
    },
)
