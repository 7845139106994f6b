import numpy
from Cython.Build import cythonize
from setuptools import Extension, setup

# -ffp-contract=off: keep the C lane's float ops un-fused so its rasters are
# bit-identical to the numpy lane (gcc defaults to contract=fast at -O3).
ext = Extension(
    "juliaspec._grids_cy",
    sources=["src/juliaspec/_grids_cy.pyx"],
    include_dirs=[numpy.get_include()],
    extra_compile_args=["-O3", "-ffp-contract=off"],
)

setup(ext_modules=cythonize([ext], compiler_directives={"language_level": "3"}))
