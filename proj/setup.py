from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

core_sources = [
    "src/norms.cpp",
    "src/prox.cpp",
    "src/smooth.cpp",
    "src/monotone.cpp",
    "src/activation.cpp",
    "src/fb_engine.cpp",
    "src/pd_engine.cpp",
    "src/distributed.cpp",
    "src/zoo.cpp",
    "src/spec_io.cpp",
    "src/runner.cpp",
]

ext = Pybind11Extension(
    "rpd._rpd",
    sources=["python/bindings.cpp"] + core_sources,
    include_dirs=["include", "vendor"],
    cxx_std=20,
)

setup(
    packages=["rpd"],
    package_dir={"rpd": "python/rpd"},
    ext_modules=[ext],
    cmdclass={"build_ext": build_ext},
)
