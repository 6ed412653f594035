from setuptools import find_packages, setup

setup(
    name="gl2-reality",
    version="0.1.0",
    author="gl2-reality developers",
    license="MIT",
    description="Exact conjugacy, reality and character computations for GL2 and GU2 over truncated DVRs",
    package_dir={"": "src"},
    packages=find_packages("./src"),
    include_package_data=True,
    install_requires=[
        "argcomplete",
        "numpy>=1.20",
        "ruamel.yaml>=0.15.2",
    ],
    extras_require={"test": ["pytest", "pytest-mock"]},
    entry_points={"console_scripts": ["gl2-reality = gl2reality.__main__:main"]},
)
