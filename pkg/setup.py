from setuptools import Extension, setup
from Cython.Build import cythonize

extensions = [
    Extension(
        "nsk1d._kernels._core",
        ["src/nsk1d/_kernels/_core.pyx"],
        extra_compile_args=["-O3", "-march=native"],
    )
]

setup(
    ext_modules=cythonize(
        extensions,
        compiler_directives={"language_level": "3", "boundscheck": False, "wraparound": False},
    )
)
