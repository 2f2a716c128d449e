from setuptools import Extension, setup

setup(
    ext_modules=[
        Extension(
            "pushopt._pvcore",
            sources=["src/pushopt/_core/pvcore.c"],
            extra_compile_args=["-O3", "-std=c11"],
            libraries=["m"],
        )
    ]
)
