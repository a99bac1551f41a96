"""
obstruction-lab evaluates and cross-checks the singular Yamabe obstructions of hypersurfaces.
"""
from os.path import abspath, dirname, join

from setuptools import find_packages, setup


def read_file(filename):
    """Read the contents of a file located relative to setup.py"""
    with open(join(abspath(dirname(__file__)), filename)) as thefile:
        return thefile.read()


setup(
    name="obstruction-lab",
    version="0.1.0",
    license="BSD",
    description=__doc__.strip(),
    long_description=read_file("README.rst"),
    long_description_content_type="text/x-rst",
    packages=find_packages(exclude=["tests"]),
    package_data={},
    python_requires=">=3.8",
    install_requires=["click>=7,<8.2", "numpy", "scipy"],
    zip_safe=False,
    entry_points={
        "console_scripts": ["obstruction-lab = obstruction_lab.__main__:cli"]
    },
    platforms="any",
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: BSD License",
        "Operating System :: OS Independent",
        "Programming Language :: Python",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.8",
        "Programming Language :: Python :: 3.9",
        "Programming Language :: Python :: 3.10",
        "Programming Language :: Python :: 3.11",
        "Programming Language :: Python :: Implementation :: CPython",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
)
