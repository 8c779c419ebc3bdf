from setuptools import Extension, setup

try:
    from Cython.Build import cythonize
except ImportError:  # pure-Python install; tfdcs._series_py is used instead
    cythonize = None

if cythonize is not None:
    ext_modules = cythonize(
        [
            Extension(
                "tfdcs._series",
                ["src/tfdcs/_series.pyx"],
                # no fast-math, FMA contraction or sin+cos fusion: results must match the fallback bit for bit
                extra_compile_args=["-O3", "-ffp-contract=off", "-fno-builtin"],
                optional=True,
            )
        ],
        compiler_directives={"language_level": "3"},
    )
else:
    ext_modules = []

setup(ext_modules=ext_modules)
