import os

from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

EIGEN_INCLUDE = os.environ.get("EIGEN_INCLUDE_DIR", "/usr/include/eigen3")

sources = [
    "bindings/module.cpp",
    "src/estimator.cpp",
    "src/ica.cpp",
    "src/io.cpp",
    "src/linalg.cpp",
    "src/model.cpp",
    "src/moments.cpp",
    "src/multiview.cpp",
    "src/rng.cpp",
    "src/statcheck.cpp",
]

ext_modules = [
    Pybind11Extension(
        "smog._core",
        sources,
        include_dirs=["include", "vendor", EIGEN_INCLUDE],
        cxx_std=20,
    )
]

setup(ext_modules=ext_modules, cmdclass={"build_ext": build_ext})
