from setuptools import setup, find_packages

setup(
    name="leraylab",
    version="1.0.0",
    description="Self-similar solutions of the fractional Navier-Stokes system computed and checked on a periodic box",
    license="AGPLv3",
    packages=find_packages(exclude=["tests"]),
    install_requires=['msgpack', 'numpy', 'plotly', 'scipy', 'pandas'],
    extras_require={
        'tests': ['pytest']
    },
    entry_points={
        'console_scripts': [
            'leraylab=leraylab.scripts.run_leraylab:main'
        ]
    }
)
